"""JSON model documents and the shipped fixtures.

Three document kinds are understood:

``boolean-system``
    ``places``: ``{"id", "initial": "high"|"low"|"none", "var"?}``;
    ``transitions``: ``{"id", "type": "closing OR"|"unary"|..., "sides"?: [x, y]}``
    or ``{"id", "guard": "<formula text>"}``;
    ``arcs``: ``[source, target]`` or ``{"source", "target", "var"?}``.
``t-system``
    ``places``: ``{"id", "tokens"}``; ``transitions``: ids; ``arcs``: pairs.
``epc``
    ``events``, ``functions``: ids; ``connectors``: ``{"id", "type"}``;
    ``arcs``: pairs; optional ``boundary`` ``{"in": [[...]], "out": [[...]]}``
    and ``low_tokens``.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any, Union

from boolsys.boolnet import BooleanSystem, ColouredMarking, LogicalType, TransitionSpec, build_net
from boolsys.epc import BoundarySpec, EpcModel
from boolsys.logic import FormulaError, format_formula, parse_formula
from boolsys.petri import Marking, NetError, PetriNet, node_key
from boolsys.tsystem import TSystem

KINDS = ("boolean-system", "t-system", "epc")
FIXTURES = (
    "fig2-tsystem", "fig4-loan-request", "fig4-corrected", "fig7-tsystem", "fig8-closing-or",
    "fig13-verification-epc", "fig13-corrected", "epc-loan-request", "epc-fig11",
)


class ModelFileError(ValueError):
    """A document that cannot be read; the message names the offending location."""


def _err(where: str, msg: str) -> ModelFileError:
    return ModelFileError(f"{where}: {msg}")


def _arc(item: Any, where: str) -> tuple[str, str, Any]:
    if isinstance(item, (list, tuple)) and len(item) == 2:
        return str(item[0]), str(item[1]), None
    if isinstance(item, dict) and "source" in item and "target" in item:
        return str(item["source"]), str(item["target"]), item.get("var")
    raise _err(where, "arc must be [source, target] or {source, target}")


def _ids(items: Any, where: str) -> list[str]:
    if not isinstance(items, list):
        raise _err(where, "expected a list")
    out = []
    for i, x in enumerate(items):
        if isinstance(x, dict):
            if "id" not in x:
                raise _err(f"{where}[{i}]", "missing 'id'")
            x = x["id"]
        if not isinstance(x, str) or not x:
            raise _err(f"{where}[{i}]", "identifier must be a nonempty string")
        out.append(x)
    return out


# --------------------------------------------------------------------------

def system_from_doc(doc: dict) -> BooleanSystem:
    places = doc.get("places")
    if not isinstance(places, list):
        raise _err("places", "expected a list")
    initial = {}
    place_vars = {}
    for i, p in enumerate(places):
        if not isinstance(p, dict) or "id" not in p:
            raise _err(f"places[{i}]", "expected an object with 'id'")
        colour = p.get("initial", "none")
        if colour not in ("high", "low", "none", None):
            raise _err(f"places[{i}].initial", f"expected high, low or none, got {colour!r}")
        if colour in ("high", "low"):
            initial[p["id"]] = colour == "high"
        place_vars[p["id"]] = p.get("var", p["id"])
    arcs = []
    for i, a in enumerate(doc.get("arcs", [])):
        src, dst, var = _arc(a, f"arcs[{i}]")
        arcs.append((src, dst))
        place = src if src in place_vars else dst
        if var is not None:
            if place not in place_vars:
                raise _err(f"arcs[{i}]", f"neither endpoint of ({src}, {dst}) is a place")
            if var != place_vars[place]:
                raise _err(f"arcs[{i}].var", f"place {place} already uses variable {place_vars[place]!r}, "
                                             f"arc says {var!r} (both arcs of a place share its variable)")
    specs = {}
    transitions = []
    for i, t in enumerate(doc.get("transitions", [])):
        where = f"transitions[{i}]"
        if not isinstance(t, dict) or "id" not in t:
            raise _err(where, "expected an object with 'id'")
        transitions.append(t["id"])
        lt = None
        if "type" in t:
            try:
                lt = LogicalType.parse(t["type"], t.get("direction"))
            except ValueError as exc:
                raise _err(f"{where}.type", str(exc)) from None
        if "guard" in t:
            try:
                g = parse_formula(t["guard"])
            except FormulaError as exc:
                raise _err(f"{where}.guard", str(exc)) from None
            specs[t["id"]] = TransitionSpec(type=lt, guard=g)
        elif lt is not None:
            sides = t.get("sides")
            specs[t["id"]] = TransitionSpec(type=lt, sides=tuple(sides) if sides else None)
        else:
            raise _err(where, "needs a 'type' or a 'guard'")
    try:
        net = PetriNet(place_vars, transitions, arcs)
        bn = build_net(net, place_vars, specs)
        return BooleanSystem(bn, ColouredMarking.from_colours(initial), doc.get("name", ""))
    except NetError as exc:
        raise ModelFileError(str(exc)) from None


def system_to_doc(bs: BooleanSystem) -> dict:
    bn = bs.bnet
    colours = bs.initial.colours()
    places = []
    for p in bn.places:
        entry: dict[str, Any] = {"id": p, "initial": {True: "high", False: "low"}.get(colours.get(p), "none")}
        if bn.var(p) != p:
            entry["var"] = bn.var(p)
        places.append(entry)
    transitions = []
    for t in bn.transitions:
        lt = bn.types.get(t)
        if t in bn.roles and lt is not None:
            entry = {"id": t, "type": lt.label.lower() if lt.is_unary else f"{lt.direction} {lt.kind}"}
            if not lt.is_unary:
                x, y = bn.roles[t][:2]
                entry["sides"] = [bn.var_place[x], bn.var_place[y]]
        else:
            entry = {"id": t, "guard": format_formula(bn.guards[t])}
        transitions.append(entry)
    arcs = sorted(([a, b] for a, b in bn.net.arcs), key=lambda x: tuple(map(node_key, x)))
    doc = {"kind": "boolean-system"}
    if bs.name:
        doc["name"] = bs.name
    doc.update({"places": places, "transitions": transitions, "arcs": arcs})
    return doc


def tsystem_from_doc(doc: dict) -> TSystem:
    places = doc.get("places")
    if not isinstance(places, list):
        raise _err("places", "expected a list")
    tokens = {}
    ids = []
    for i, p in enumerate(places):
        if isinstance(p, str):
            ids.append(p)
            continue
        if not isinstance(p, dict) or "id" not in p:
            raise _err(f"places[{i}]", "expected an object with 'id'")
        ids.append(p["id"])
        n = p.get("tokens", 0)
        if not isinstance(n, int) or n < 0:
            raise _err(f"places[{i}].tokens", "expected a natural number")
        tokens[p["id"]] = n
    trans = _ids(doc.get("transitions", []), "transitions")
    arcs = [_arc(a, f"arcs[{i}]")[:2] for i, a in enumerate(doc.get("arcs", []))]
    try:
        return TSystem(PetriNet(ids, trans, arcs), Marking(tokens))
    except NetError as exc:
        raise ModelFileError(str(exc)) from None


def tsystem_to_doc(ts: TSystem, name: str = "") -> dict:
    doc: dict[str, Any] = {"kind": "t-system"}
    if name:
        doc["name"] = name
    doc["places"] = [{"id": p, "tokens": ts.initial[p]} for p in ts.net.places]
    doc["transitions"] = list(ts.net.transitions)
    doc["arcs"] = sorted(([a, b] for a, b in ts.net.arcs), key=lambda x: tuple(map(node_key, x)))
    return doc


def epc_from_doc(doc: dict) -> tuple[EpcModel, BoundarySpec | None, list[str] | None]:
    events = _ids(doc.get("events", []), "events")
    functions = _ids(doc.get("functions", []), "functions")
    connectors = {}
    for i, c in enumerate(doc.get("connectors", [])):
        if not isinstance(c, dict) or "id" not in c or "type" not in c:
            raise _err(f"connectors[{i}]", "expected an object with 'id' and 'type'")
        connectors[c["id"]] = str(c["type"]).upper()
    arcs = [_arc(a, f"arcs[{i}]")[:2] for i, a in enumerate(doc.get("arcs", []))]
    spec = boundary_from_doc(doc["boundary"], "boundary") if "boundary" in doc else None
    lows = doc.get("low_tokens")
    if lows is not None:
        lows = _ids(lows, "low_tokens")
    return EpcModel(events, functions, connectors, arcs, doc.get("name", "")), spec, lows


def boundary_from_doc(doc: Any, where: str = "boundary") -> BoundarySpec:
    if not isinstance(doc, dict) or "in" not in doc or "out" not in doc:
        raise _err(where, "expected {\"in\": [[...]], \"out\": [[...]]}")
    sides = {}
    for side in ("in", "out"):
        combos = doc[side]
        if not isinstance(combos, list) or not all(isinstance(c, list) for c in combos):
            raise _err(f"{where}.{side}", "expected a list of event lists")
        sides[side] = [frozenset(map(str, c)) for c in combos]
    return BoundarySpec(sides["in"], sides["out"])


def epc_to_doc(m: EpcModel, spec: BoundarySpec | None = None, low_tokens=None) -> dict:
    doc: dict[str, Any] = {"kind": "epc"}
    if m.name:
        doc["name"] = m.name
    doc["events"] = list(m.events)
    doc["functions"] = list(m.functions)
    doc["connectors"] = [{"id": c, "type": k} for c, k in m.connectors.items()]
    doc["arcs"] = [list(a) for a in m.arcs]
    if spec is not None:
        doc["boundary"] = spec.to_dict()
    if low_tokens is not None:
        doc["low_tokens"] = list(low_tokens)
    return doc


# --------------------------------------------------------------------------

def parse_document(text: str, source: str = "<input>") -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ModelFileError(f"{source}: top level must be an object")
    if doc.get("kind") not in KINDS:
        raise ModelFileError(f"{source}: 'kind' must be one of {list(KINDS)}, got {doc.get('kind')!r}")
    return doc


def fixture_path(name: str) -> Path:
    res = resources.files("boolsys") / "fixtures" / f"{name}.json"
    return Path(str(res))


def resolve(path_or_name: Union[str, Path]) -> tuple[str, str]:
    """(text, source label) for a file path or the name of a shipped fixture."""
    p = Path(path_or_name)
    if p.is_file():
        return p.read_text(encoding="utf-8"), str(p)
    name = str(path_or_name)
    if name.endswith(".json"):
        name = name[:-5]
    fp = fixture_path(name)
    if fp.is_file():
        return fp.read_text(encoding="utf-8"), f"fixture {name}"
    raise ModelFileError(f"{path_or_name}: no such file or fixture (fixtures: {', '.join(FIXTURES)})")


def load(path_or_name: Union[str, Path]):
    """Load a document; returns (kind, object) where object depends on the kind."""
    text, source = resolve(path_or_name)
    doc = parse_document(text, source)
    try:
        if doc["kind"] == "boolean-system":
            return doc["kind"], system_from_doc(doc)
        if doc["kind"] == "t-system":
            return doc["kind"], tsystem_from_doc(doc)
        return doc["kind"], epc_from_doc(doc)
    except ModelFileError as exc:
        raise ModelFileError(f"{source}: {exc}") from None


def load_system(path_or_name) -> BooleanSystem:
    kind, obj = load(path_or_name)
    if kind != "boolean-system":
        raise ModelFileError(f"{path_or_name}: expected a boolean-system document, got {kind}")
    return obj


def load_fixture(name: str):
    return load(name)[1]


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
