"""Event-driven process chains: validation, boundary handling and translation.

An EPC is turned into a Boolean system in four steps: propose (or accept)
the intended combinations of start and end events, short-circuit the model
through an extra ``start/end`` event, split connectors with more than two
branches into chains of binary ones, and finally map events to places,
functions to unary transitions and connectors to typed binary transitions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

import networkx as nx

from boolsys.boolnet import (
    CLOSING, OPENING, UNARY, BooleanSystem, ColouredMarking, LogicalType, TransitionSpec, build_net,
)
from boolsys.petri import Marking, NetError, PetriNet, node_key, sorted_nodes
from boolsys.tsystem import TSystem, check_skeleton, min_token_circuit, token_free_circuit

CONNECTOR_KINDS = ("AND", "XOR", "OR")
START_END = "start/end"


class EpcError(NetError):
    """Structural fault of an EPC (after short-circuiting, or during translation)."""


@dataclass
class EpcModel:
    events: tuple[str, ...]
    functions: tuple[str, ...]
    connectors: dict[str, str]  # id -> AND / XOR / OR
    arcs: tuple[tuple[str, str], ...]
    name: str = ""

    def __post_init__(self):
        self.events = tuple(sorted_nodes(self.events))
        self.functions = tuple(sorted_nodes(self.functions))
        self.connectors = {c: self.connectors[c].upper() for c in sorted_nodes(self.connectors)}
        self.arcs = tuple(sorted(set((str(a), str(b)) for a, b in self.arcs),
                                 key=lambda x: (node_key(x[0]), node_key(x[1]))))

    @property
    def nodes(self) -> list[str]:
        return list(self.events) + list(self.functions) + list(self.connectors)

    def succ(self, x: str) -> list[str]:
        return sorted_nodes(b for a, b in self.arcs if a == x)

    def pred(self, x: str) -> list[str]:
        return sorted_nodes(a for a, b in self.arcs if b == x)

    def direction(self, c: str) -> str:
        """``split`` or ``join`` as implied by the arcs of connector ``c``."""
        nin, nout = len(self.pred(c)), len(self.succ(c))
        if nin == 1 and nout >= 2:
            return "split"
        if nout == 1 and nin >= 2:
            return "join"
        return "invalid"

    def in_events(self) -> list[str]:
        return [e for e in self.events if not self.pred(e)]

    def out_events(self) -> list[str]:
        return [e for e in self.events if not self.succ(e)]

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.arcs)
        return g

    def kind_of(self, x: str) -> str:
        if x in self.connectors:
            return "connector"
        if x in self.functions:
            return "function"
        if x in self.events:
            return "event"
        raise KeyError(x)


@dataclass
class BoundarySpec:
    in_combinations: list[frozenset[str]]
    out_combinations: list[frozenset[str]]
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        key = lambda s: [node_key(x) for x in sorted_nodes(s)]  # noqa: E731
        self.in_combinations = sorted({frozenset(s) for s in self.in_combinations}, key=key)
        self.out_combinations = sorted({frozenset(s) for s in self.out_combinations}, key=key)

    def to_dict(self) -> dict:
        return {"in": [sorted_nodes(s) for s in self.in_combinations],
                "out": [sorted_nodes(s) for s in self.out_combinations]}

    def __str__(self) -> str:
        fmt = lambda cs: " | ".join("{" + ", ".join(sorted_nodes(s)) + "}" for s in cs)  # noqa: E731
        return f"in: {fmt(self.in_combinations)}; out: {fmt(self.out_combinations)}"


# --------------------------------------------------------------------------

def validate_epc(m: EpcModel) -> list[str]:
    out: list[str] = []
    ids = m.nodes
    dup = sorted_nodes({x for x in ids if ids.count(x) > 1})
    if dup:
        out.append(f"identifiers used more than once: {dup}")
    known = set(ids)
    for kind in m.connectors.values():
        if kind not in CONNECTOR_KINDS:
            out.append(f"unknown connector type {kind!r}")
    for a, b in m.arcs:
        for x in (a, b):
            if x not in known:
                out.append(f"arc ({a}, {b}) refers to unknown node {x!r}")
        if a == b:
            out.append(f"self-loop on {a}")
    if any("unknown node" in v or "self-loop" in v for v in out):
        return out
    for a, b in m.arcs:
        ka, kb = m.kind_of(a), m.kind_of(b)
        if ka == kb == "event":
            out.append(f"adjacent events {a} -> {b}")
        if ka == kb == "function":
            out.append(f"adjacent functions {a} -> {b}")
    for e in m.events:
        if len(m.pred(e)) > 1 or len(m.succ(e)) > 1:
            out.append(f"event {e} needs at most one incoming and one outgoing arc")
        if not m.pred(e) and not m.succ(e):
            out.append(f"event {e} is isolated")
    for f in m.functions:
        if len(m.pred(f)) != 1 or len(m.succ(f)) != 1:
            out.append(f"function {f} needs exactly one incoming and one outgoing arc")
    for c in m.connectors:
        if m.direction(c) == "invalid":
            out.append(f"connector {c} must be a split (1 in, >=2 out) or a join (>=2 in, 1 out)")
    ins, outs = m.in_events(), m.out_events()
    if (ins or outs) and not (ins and outs):
        out.append(f"boundary events must include at least one in-event and one out-event "
                   f"(found {len(ins)} in, {len(outs)} out)")
    if ids and not nx.is_weakly_connected(m.graph()):
        out.append("EPC is not connected")
    return out


def _combine(kind: str, parts: list[set[frozenset]]) -> set[frozenset]:
    if kind == "XOR":
        return set().union(*parts)
    if kind == "AND":
        acc = {frozenset()}
        for p in parts:
            acc = {a | b for a in acc for b in p}
        return acc
    # OR: any nonempty selection of branches, each contributing one of its options
    acc: set[frozenset] = set()
    for r in range(1, len(parts) + 1):
        for chosen in itertools.combinations(parts, r):
            acc |= _combine("AND", list(chosen))
    return acc


def _boundary_side(m: EpcModel, boundary: list[str], succ, pred, notes: list[str], side: str) -> list[frozenset]:
    """Combinations of ``boundary`` events read off the split trees just before them.

    ``succ``/``pred`` orient the walk; for in-events the graph is reversed
    so joins behave like splits.
    """
    def is_split(x):
        return x in m.connectors and len(succ(x)) >= 2 and len(pred(x)) == 1

    def upstream_split(x):
        """Nearest split reached backwards through single-predecessor plain nodes."""
        seen = set()
        while x not in seen:
            seen.add(x)
            ps = pred(x)
            if len(ps) != 1:
                return None
            x = ps[0]
            if is_split(x):
                return x
            if x in m.connectors:
                return None
        return None

    roots = set()
    alone = []
    for e in boundary:
        s = upstream_split(e)
        if s is None:
            alone.append(e)
            continue
        climbed = {s}
        while True:
            up = upstream_split(s)
            if up is None or up in climbed:
                break
            climbed.add(up)
            s = up
        roots.add(s)

    bset = set(boundary)

    def walk(x, stack):
        if x in bset:
            return {frozenset([x])}
        if x in stack:
            return {frozenset()}
        if is_split(x):
            parts = [walk(y, stack | {x}) for y in succ(x)]
            return _combine(m.connectors[x], parts)
        if x in m.connectors:
            return {frozenset()}  # a join ends the tree
        nxt = succ(x)
        if len(nxt) != 1:
            return {frozenset()}
        return walk(nxt[0], stack | {x})

    combos: set[frozenset] = {frozenset([e]) for e in alone}
    for r in sorted_nodes(roots):
        combos |= walk(r, frozenset())
    combos.discard(frozenset())
    covered = set().union(*combos) if combos else set()
    for e in boundary:
        if e not in covered:
            combos.add(frozenset([e]))
            notes.append(f"{side}-event {e} is not reached by a connector tree; proposed alone, please confirm")
    return list(combos)


def propose_boundary(m: EpcModel) -> BoundarySpec:
    """Mirror reflection of the connector trees next to the boundary events."""
    notes: list[str] = []
    outs = _boundary_side(m, m.out_events(), m.succ, m.pred, notes, "out")
    ins = _boundary_side(m, m.in_events(), m.pred, m.succ, notes, "in")
    return BoundarySpec(ins, outs, notes)


def _check_spec(m: EpcModel, spec: BoundarySpec):
    for side, combos, legal in (("in", spec.in_combinations, set(m.in_events())),
                                ("out", spec.out_combinations, set(m.out_events()))):
        if not combos:
            raise EpcError(f"boundary spec lists no {side}-combinations")
        for c in combos:
            if not c:
                raise EpcError(f"empty {side}-combination")
            bad = sorted_nodes(c - legal)
            if bad:
                raise EpcError(f"{bad} are not {side}-events of the model")
        missing = sorted_nodes(legal - set().union(*combos))
        if missing:
            raise EpcError(f"{side}-events {missing} appear in no combination")


def _family_shape(combos: list[frozenset]) -> str:
    """``disjoint`` (AND inside, XOR across) or ``or`` (all nonempty subsets of one set)."""
    union = frozenset().union(*combos)
    if sum(len(c) for c in combos) == len(union):
        return "disjoint"
    subsets = {frozenset(s) for r in range(1, len(union) + 1) for s in itertools.combinations(union, r)}
    if set(combos) == subsets:
        return "or"
    raise EpcError("overlapping boundary combinations that are not all subsets of one event set "
                   "cannot be realized by connectors")


def short_circuit(m: EpcModel, spec: BoundarySpec) -> EpcModel:
    """Close the model through a ``start/end`` event realizing the intended combinations."""
    if not m.in_events() and not m.out_events():
        if not nx.is_strongly_connected(m.graph()):
            raise EpcError("EPC without boundary events is not strongly connected")
        return m
    _check_spec(m, spec)
    events = list(m.events) + [START_END]
    functions = list(m.functions) + ["end", "start"]
    connectors = dict(m.connectors)
    arcs = list(m.arcs)

    def gather(combos, target, join: bool, tag: str):
        """Wire combinations into ``target`` (joins) or out of ``target`` (splits)."""
        def link(a, b):
            arcs.append((a, b) if join else (b, a))

        shape = _family_shape(combos)
        if len(combos) == 1 and len(combos[0]) == 1:
            link(next(iter(combos[0])), target)
            return
        if shape == "or":
            c = f"{tag}_or"
            connectors[c] = "OR"
            for e in sorted_nodes(frozenset().union(*combos)):
                link(e, c)
            link(c, target)
            return
        heads = []
        for i, combo in enumerate(combos, 1):
            if len(combo) == 1:
                heads.append(next(iter(combo)))
                continue
            c = f"{tag}_and{i}"
            connectors[c] = "AND"
            for e in sorted_nodes(combo):
                link(e, c)
            heads.append(c)
        if len(heads) == 1:
            link(heads[0], target)
        else:
            c = f"{tag}_xor"
            connectors[c] = "XOR"
            for h in heads:
                link(h, c)
            link(c, target)

    gather(spec.out_combinations, "end", True, "end")
    arcs.append(("end", START_END))
    arcs.append((START_END, "start"))
    gather(spec.in_combinations, "start", False, "start")
    out = EpcModel(events, functions, connectors, arcs, m.name)
    if not nx.is_strongly_connected(out.graph()):
        comps = sorted((sorted_nodes(c) for c in nx.strongly_connected_components(out.graph())),
                       key=lambda c: node_key(c[0]))
        stray = [c for c in comps if START_END not in c]
        raise EpcError("EPC structure is faulty: not strongly connected after short-circuiting; "
                       f"nodes outside the main cycle: {[x for c in stray for x in c]}")
    return out


def binarize(m: EpcModel) -> EpcModel:
    """Replace connectors with more than two branches by chains of binary ones (C -> C1, C2, ...)."""
    connectors = dict(m.connectors)
    arcs = list(m.arcs)
    for c, kind in m.connectors.items():
        ins, outs = m.pred(c), m.succ(c)
        if len(ins) > 2 and len(outs) == 1:
            chain = [f"{c}{k}" for k in range(1, len(ins))]
            arcs = [a for a in arcs if c not in a]
            del connectors[c]
            for k, name in enumerate(chain):
                connectors[name] = kind
                first = ins[0] if k == 0 else chain[k - 1]
                arcs += [(first, name), (ins[k + 1], name)]
            arcs.append((chain[-1], outs[0]))
        elif len(outs) > 2 and len(ins) == 1:
            chain = [f"{c}{k}" for k in range(1, len(outs))]
            arcs = [a for a in arcs if c not in a]
            del connectors[c]
            arcs.append((ins[0], chain[0]))
            for k, name in enumerate(chain):
                connectors[name] = kind
                arcs.append((name, outs[k]))
                arcs.append((name, chain[k + 1] if k + 1 < len(chain) else outs[-1]))
    return EpcModel(m.events, m.functions, connectors, arcs, m.name)


# --------------------------------------------------------------------------

@dataclass
class Translation:
    system: BooleanSystem
    log: list[str]
    low_tokens: list[str]


def _aux_place(a: str, b: str) -> str:
    return f"p_{a}_{b}"


def _skeleton_net(m: EpcModel):
    places = list(m.events)
    transitions = list(m.functions) + list(m.connectors)
    arcs = []
    log = []
    tset = set(transitions)
    for a, b in m.arcs:
        if a in tset and b in tset:
            p = _aux_place(a, b)
            places.append(p)
            arcs += [(a, p), (p, b)]
            log.append(f"inserted place {p} between {a} and {b}")
        else:
            arcs.append((a, b))
    return places, transitions, arcs, log


def _fits(ts: TSystem) -> bool:
    return all(min_token_circuit(ts, p).token_count <= 1 for p in ts.net.places)


def _back_edge_places(net: PetriNet, start: str) -> set[str]:
    """Places on back edges of a depth-first search from ``start`` (successors in natural order)."""
    out: set[str] = set()
    on_stack = {start}
    done: set[str] = set()
    stack = [(start, iter(sorted_nodes(net.post(start))))]
    while stack:
        node, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            on_stack.discard(node)
            done.add(node)
            continue
        if nxt in on_stack:
            out.add(node if net.is_place(node) else nxt)
        elif nxt not in done:
            on_stack.add(nxt)
            stack.append((nxt, iter(sorted_nodes(net.post(nxt)))))
    return out


def _place_low_tokens(net: PetriNet, tokens: dict, start: str, log: list[str], budget: int = 10000) -> list[str]:
    """Mark every circuit with exactly one token where possible.

    While a token-free circuit remains, put a low token on one of its
    places, preferring places on loop-back arcs, then natural order; a
    choice that would leave some place only on circuits with two or more
    tokens is skipped.  Dead ends backtrack.
    """
    back = _back_edge_places(net, start)
    steps = 0

    def search(current: dict) -> Optional[list[tuple[str, str]]]:
        nonlocal steps
        witness = token_free_circuit(TSystem(net, Marking(current)))
        if witness is None:
            return []
        for p in sorted(witness.places(), key=lambda x: (x not in back, node_key(x))):
            steps += 1
            if steps > budget:
                return None
            trial = {**current, p: 1}
            if not _fits(TSystem(net, Marking(trial))):
                continue
            rest = search(trial)
            if rest is not None:
                return [(p, str(witness))] + rest
        return None

    chosen = search(dict(tokens))
    if chosen is None:
        witness = token_free_circuit(TSystem(net, Marking(tokens)))
        raise EpcError(f"no low-token placement makes the skeleton live and safe; unmarked circuit {witness}")
    for p, w in chosen:
        tokens[p] = 1
        log.append(f"low token on {p} (marks circuit {w})")
    return [p for p, _ in chosen]


def translate(m: EpcModel, low_tokens: Optional[Iterable[str]] = None, start: str = START_END) -> Translation:
    """Boolean system of a short-circuited, binarized EPC."""
    problems = validate_epc(m)
    if problems:
        raise EpcError("invalid EPC: " + "; ".join(problems))
    if m.in_events() or m.out_events():
        raise EpcError("EPC still has boundary events; short-circuit it first")
    wide = [c for c in m.connectors if max(len(m.pred(c)), len(m.succ(c))) > 2]
    if wide:
        raise EpcError(f"connectors {wide} have more than two branches; binarize first")
    places, transitions, arcs, log = _skeleton_net(m)
    net = PetriNet(places, transitions, arcs)
    if start not in m.events:
        raise EpcError(f"start event {start!r} not in the model")

    specs = {f: TransitionSpec(UNARY) for f in m.functions}
    for c, kind in m.connectors.items():
        specs[c] = TransitionSpec(LogicalType(kind, CLOSING if m.direction(c) == "join" else OPENING))
    bn = build_net(net, {p: p for p in places}, specs)

    tokens = {start: 1}
    if low_tokens is not None:
        lows = sorted_nodes(set(low_tokens))
        for p in lows:
            if p not in places:
                raise EpcError(f"low-token place {p!r} does not exist")
            if p == start:
                raise EpcError("the start/end event already carries the high token")
            tokens[p] = 1
            log.append(f"low token on {p} (given)")
    else:
        lows = _place_low_tokens(net, tokens, start, log)
    verdict = check_skeleton(TSystem(net, Marking(tokens)))
    if not verdict.live:
        raise EpcError(f"skeleton not live: token-free circuit {verdict.unmarked_circuit}")
    if not verdict.safe:
        raise EpcError(f"skeleton not safe at place {verdict.unsafe_place}: circuit {verdict.unsafe_circuit}")
    colours = {p: p == start for p in tokens}
    bs = BooleanSystem(bn, ColouredMarking.from_colours(colours), m.name)
    return Translation(bs, log, sorted_nodes(lows))


def epc_to_system(m: EpcModel, spec: Optional[BoundarySpec] = None,
                  low_tokens: Optional[Iterable[str]] = None) -> Translation:
    """Validate, short-circuit (with ``spec`` or the proposed boundary), binarize and translate."""
    problems = validate_epc(m)
    if problems:
        raise EpcError("invalid EPC: " + "; ".join(problems))
    log = []
    if m.in_events() or m.out_events():
        if spec is None:
            spec = propose_boundary(m)
            log.append(f"proposed boundary {spec}")
            log += spec.notes
        m = short_circuit(m, spec)
        log.append(f"short-circuited through event {START_END!r}")
    b = binarize(m)
    for c in m.connectors:
        if c not in b.connectors:
            log.append(f"binarized connector {c} into {[x for x in b.connectors if x.startswith(c) and x not in m.connectors]}")
    tr = translate(b, low_tokens)
    tr.log[:0] = log
    return tr


__all__ = [
    "BoundarySpec", "EpcError", "EpcModel", "START_END", "Translation", "binarize", "epc_to_system",
    "propose_boundary", "short_circuit", "translate", "validate_epc",
]
