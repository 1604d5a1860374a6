"""Command line front end: ``boolsys verify|translate|unfold|fixtures|show|generate``.

Exit codes: 0 well-behaved (or success), 1 ill-behaved, 2 usage, file or
structural problems, 3 when ``--oracle`` disagrees with the SAT verdict.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Optional

from boolsys import io
from boolsys.boolnet import BooleanSystem, skeleton_of
from boolsys.checker import MODES, VerificationReport, verify
from boolsys.epc import EpcError, epc_to_system, propose_boundary
from boolsys.petri import NetError
from boolsys.randnets import default_seed, random_system
from boolsys.tsystem import TSystem
from boolsys.unfolding import unfold_complete

EXIT_OK, EXIT_ILL, EXIT_ERROR, EXIT_ORACLE = 0, 1, 2, 3


class CliError(Exception):
    pass


def _err(msg: str):
    print(f"boolsys: error: {msg}", file=sys.stderr)


def _system_from(path: str, force: bool, boundary: Optional[str] = None) -> tuple[BooleanSystem, list[str]]:
    """A Boolean system from any document kind (EPCs are translated first)."""
    kind, obj = io.load(path)
    if kind == "boolean-system":
        return obj, []
    if kind == "t-system":
        raise CliError(f"{path}: a t-system document carries no colours; use 'boolsys unfold'")
    model, spec, lows = obj
    if boundary is not None:
        spec = io.boundary_from_doc(_read_json(boundary), boundary)
    if spec is None and _needs_confirmation(model) and not force:
        proposal = propose_boundary(model)
        raise CliError(f"{path}: no boundary combinations given; proposal is {proposal}. "
                       "Pass --boundary FILE, add 'boundary' to the document, or accept the proposal with --force")
    tr = epc_to_system(model, spec, lows)
    return tr.system, tr.log


def _needs_confirmation(model) -> bool:
    """A boundary is ambiguous unless there is at most one in-event and one out-event."""
    return len(model.in_events()) > 1 or len(model.out_events()) > 1


def _read_json(path: str):
    text, source = io.resolve(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise io.ModelFileError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _oracle(bs: BooleanSystem, report: VerificationReport) -> list[str]:
    from boolsys.bruteforce import analyse_colours, skeleton_live, skeleton_safe

    problems = []
    if report.overall == "skeleton_failure":
        ts = skeleton_of(bs)
        if skeleton_live(ts) and skeleton_safe(ts) and report.skeleton.get("strongly_connected"):
            problems.append("oracle finds a live and safe skeleton")
        return problems
    a = analyse_colours(bs)
    dl = {f.transition for f in report.deadlock_transitions()}
    if dl != a.deadlock_transitions:
        problems.append(f"deadlock transitions: checker {sorted(dl)}, oracle {sorted(a.deadlock_transitions)}")
    if not dl:
        nl = {f.transition for f in report.non_live_transitions()}
        bf = {t for t, _ in a.non_live_bindings}
        if nl != bf:
            problems.append(f"non-live transitions: checker {sorted(nl)}, oracle {sorted(bf)}")
    return problems


def cmd_verify(args) -> int:
    bs, log = _system_from(args.model, args.force, args.boundary)
    report = verify(bs, args.mode)
    if args.format == "machine":
        doc = report.to_dict()
        if log:
            doc["translation_log"] = log
        print(json.dumps(doc, indent=2))
    else:
        for line in log:
            print(f"# {line}")
        print(report.render_text())
    code = report.exit_code
    if args.oracle:
        problems = _oracle(bs, report)
        for p in problems:
            print(f"ORACLE DISAGREES: {p}", file=sys.stderr)
        if problems:
            return EXIT_ORACLE
        print("# oracle agrees", file=sys.stderr)
    return code


def cmd_translate(args) -> int:
    kind, obj = io.load(args.model)
    if kind != "epc":
        raise CliError(f"{args.model}: expected an epc document, got {kind}")
    model, spec, lows = obj
    if args.boundary:
        spec = io.boundary_from_doc(_read_json(args.boundary), args.boundary)
    if args.propose or (spec is None and _needs_confirmation(model)):
        proposal = propose_boundary(model)
        # keep stdout clean for the emitted document
        out = sys.stderr if args.force else sys.stdout
        print(f"proposed boundary: {proposal}", file=out)
        for note in proposal.notes:
            print(f"  note: {note}", file=out)
        print(json.dumps(proposal.to_dict()), file=out)
        if not args.force:
            if args.propose:
                return EXIT_OK
            print("not translated: confirm with --boundary FILE or accept the proposal with --force",
                  file=sys.stderr)
            return EXIT_ERROR
        spec = proposal
    tr = epc_to_system(model, spec, lows)
    for line in tr.log:
        print(f"# {line}", file=sys.stderr)
    text = io.dumps(io.system_to_doc(tr.system))
    if args.emit:
        with open(args.emit, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.emit}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_unfold(args) -> int:
    kind, obj = io.load(args.model)
    if kind == "boolean-system":
        ts = skeleton_of(obj)
    elif kind == "t-system":
        ts = obj
    else:
        raise CliError(f"{args.model}: unfold needs a t-system or boolean-system document")
    assert isinstance(ts, TSystem)
    pfx = unfold_complete(ts)
    if args.dump:
        print(json.dumps(pfx.dump(), indent=2))
        return EXIT_OK
    s = pfx.summary()
    print(f"n = {s['n']}")
    print(f"events: {s['events']}")
    print(f"conditions: {s['conditions']}")
    print(f"min cut: {', '.join(pfx.min_cut)} -> {pfx.fold_cut(pfx.min_cut)}")
    print(f"max cut: {', '.join(pfx.max_cut)} -> {pfx.fold_cut(pfx.max_cut)}")
    return EXIT_OK


def cmd_fixtures(args) -> int:
    for name in io.FIXTURES:
        doc = io.parse_document(io.resolve(name)[0], name)
        print(f"{name:24} {doc['kind']:15} {doc.get('name', '')}")
    return EXIT_OK


def cmd_show(args) -> int:
    text, _ = io.resolve(args.model)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_generate(args) -> int:
    seed = default_seed() if args.seed is None else args.seed
    rng = random.Random(seed)
    bs = random_system(rng, places=args.places, max_tokens=args.tokens, live=not args.non_live)
    bs = BooleanSystem(bs.bnet, bs.initial, f"random-{seed}")
    sys.stdout.write(io.dumps(io.system_to_doc(bs)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="boolsys", description="Model checking of Boolean systems and EPCs.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="decide well-behavedness of a model (file or fixture name)")
    v.add_argument("model")
    v.add_argument("--mode", choices=MODES, default="optimized")
    v.add_argument("--format", choices=("text", "machine"), default="text")
    v.add_argument("--oracle", action="store_true", help="cross-check with explicit state enumeration")
    v.add_argument("--boundary", help="JSON file with boundary combinations for an EPC")
    v.add_argument("--force", action="store_true", help="accept the proposed EPC boundary")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("translate", help="translate an EPC into a Boolean system")
    t.add_argument("model")
    g = t.add_mutually_exclusive_group()
    g.add_argument("--boundary", help="JSON file {\"in\": [[...]], \"out\": [[...]]}")
    g.add_argument("--propose", action="store_true", help="print the proposed boundary")
    t.add_argument("--force", action="store_true", help="translate with the proposed boundary")
    t.add_argument("--emit", metavar="OUT", help="write the Boolean system here instead of stdout")
    t.set_defaults(func=cmd_translate)

    u = sub.add_parser("unfold", help="summarize the complete prefix of the skeleton")
    u.add_argument("model")
    u.add_argument("--dump", action="store_true", help="print all conditions, events and arcs as JSON")
    u.set_defaults(func=cmd_unfold)

    f = sub.add_parser("fixtures", help="list the shipped example models")
    f.set_defaults(func=cmd_fixtures)

    s = sub.add_parser("show", help="print a model document")
    s.add_argument("model")
    s.set_defaults(func=cmd_show)

    r = sub.add_parser("generate", help="print a random strongly connected Boolean system")
    r.add_argument("--places", type=int, default=8)
    r.add_argument("--tokens", type=int, default=3)
    r.add_argument("--seed", type=int, help="defaults to $BOOLSYS_SEED or 0")
    r.add_argument("--non-live", action="store_true", help="leave a token-free circuit in the skeleton")
    r.set_defaults(func=cmd_generate)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, io.ModelFileError, EpcError, NetError) as exc:
        _err(str(exc))
        return EXIT_ERROR
    except RuntimeError as exc:
        _err(str(exc))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
