"""Colouring of a complete prefix, base markings, formulas and the successor graph.

Every condition of the prefix gets a variable of its own, ``var#k`` for the
k-th token that ever visits the place with variable ``var``.  Each event
carries the guard of the transition it folds to, rewritten over the
variables of its pre- and post-conditions.  Reachability questions about
the coloured prefix then become satisfiability questions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

import networkx as nx

from boolsys.boolnet import BindingElement, BooleanSystem, bindings_of
from boolsys.logic import FALSE, Cnf, Formula, conj, disj, eval_formula, literal, rename, solve, to_cnf
from boolsys.petri import NetError
from boolsys.unfolding import Prefix, past

MAX_MIN_CUT = 16

#: A base marking: colour (True = high) of every min-cut condition, in min-cut order.
BaseMarking = tuple[tuple[str, bool], ...]


@dataclass
class ColouredPrefix:
    pfx: Prefix
    bs: BooleanSystem
    cond_vars: dict[str, str]
    guards: dict[str, Formula]
    cov: dict[str, str]

    @property
    def on(self):
        return self.pfx.on

    @property
    def min_cut(self):
        return self.pfx.min_cut

    @property
    def max_cut(self):
        return self.pfx.max_cut

    def events_of(self, t: str) -> list[str]:
        return self.pfx.events_of(t)

    def event_vars(self, e: str) -> dict[str, str]:
        """Arc variable of the net -> condition variable, for the arcs of event ``e``."""
        bn = self.bs.bnet
        out = {}
        for b in self.on.event_pre[e] + self.on.event_post[e]:
            out[bn.var(self.cov[b])] = self.cond_vars[b]
        return out

    def base_from_colours(self, colours: Mapping[str, bool]) -> BaseMarking:
        return tuple((b, bool(colours[b])) for b in self.min_cut)

    def base_label(self, base: BaseMarking) -> str:
        """Conjunction of the base marking in min-cut order, e.g. ``A1 and not A2``."""
        bn = self.bs.bnet
        return " and ".join(("" if c else "not ") + bn.var(self.cov[b]) for b, c in base)


def colour_prefix(pfx: Prefix, bs: BooleanSystem) -> ColouredPrefix:
    bn = bs.bnet
    if pfx.ts.net != bs.net:
        raise NetError("prefix was not built over the skeleton of this system")
    cond_vars = {}
    for b in pfx.on.conditions:
        cond_vars[b] = f"{bn.var(pfx.fold[b])}#{pfx.cond_index[b]}"
    guards = {}
    for e in pfx.on.events:
        t = pfx.fold[e]
        mapping = {}
        for b in pfx.on.event_pre[e] + pfx.on.event_post[e]:
            mapping[bn.var(pfx.fold[b])] = cond_vars[b]
        guards[e] = rename(bn.guards[t], mapping)
    return ColouredPrefix(pfx, bs, cond_vars, guards, dict(pfx.fold))


# --------------------------------------------------------------------------
# formulas

def mark_formula(cp: ColouredPrefix, colours: Mapping[str, bool] | Iterable[tuple[str, bool]]) -> Formula:
    items = colours.items() if isinstance(colours, Mapping) else colours
    parts = []
    for b, c in items:
        if b not in cp.cond_vars:
            raise NetError(f"unknown condition {b!r}")
        parts.append(literal(cp.cond_vars[b], c))
    return conj(parts)


def guard_formula(cp: ColouredPrefix, events: Iterable[str]) -> Formula:
    return conj(cp.guards[e] for e in sorted(events, key=lambda e: cp.on.events.index(e)))


def reach_formula(cp: ColouredPrefix, base: BaseMarking, target: Mapping[str, bool]) -> Formula:
    """Mark(base) and the guards of the causal past of the target and Mark(target)."""
    events = past(cp.on, list(target))
    return conj([mark_formula(cp, base), guard_formula(cp, events), mark_formula(cp, target)])


def input_pattern(cp: ColouredPrefix, e: str, b: BindingElement | Mapping[str, bool]) -> dict[str, bool]:
    """Pre-conditions of ``e`` coloured by the input values of a binding of its transition."""
    bn = cp.bs.bnet
    t = cp.cov[e]
    values = b.as_dict() if isinstance(b, BindingElement) else dict(b)
    if set(values) != set(bn.adjacent_vars(t)) or not eval_formula(bn.guards[t], values):
        raise NetError(f"{values} is not a binding of {t}")
    return {c: values[bn.var(cp.cov[c])] for c in cp.on.event_pre[e]}


def enabl_formula(cp: ColouredPrefix, base: BaseMarking, e: str, b) -> Formula:
    return reach_formula(cp, base, input_pattern(cp, e, b))


def deadlock_patterns(cp_or_bn, t: str) -> list[dict[str, bool]]:
    """Input colourings of ``t`` that no binding accepts (keys are the input arc variables).

    For the standard closing types these are AND: X and not Y, not X and Y;
    XOR: X and Y; AND_XOR: not X and Y; XOR_AND: X and not Y; OR: none.
    """
    bn = cp_or_bn.bs.bnet if isinstance(cp_or_bn, ColouredPrefix) else cp_or_bn
    ins = bn.in_vars(t)
    covered = {tuple(be.as_dict()[v] for v in ins) for be in bindings_of(bn, t)}
    out = []
    for bits in _vectors(len(ins)):
        if bits not in covered:
            out.append(dict(zip(ins, bits)))
    return out


def _vectors(k: int):
    return list(itertools.product((False, True), repeat=k))


def dead_formula(cp: ColouredPrefix, base: BaseMarking, e: str) -> Formula:
    """Disjunction over the deadlock patterns of Reach(pattern on the pre-conditions of e).

    All patterns share the same co-set, hence the same causal past, so the
    disjunction is factored into one formula.
    """
    bn = cp.bs.bnet
    t = cp.cov[e]
    lt = bn.types.get(t)
    if (lt is not None and lt.is_unary) or (len(bn.in_vars(t)), len(bn.out_vars(t))) == (1, 1):
        raise NetError(f"Dead is undefined for unary transition {t}")
    if lt is not None and lt.is_opening:
        return FALSE
    pats = deadlock_patterns(bn, t)
    if not pats:
        return FALSE
    pre = cp.on.event_pre[e]
    var_cond = {bn.var(cp.cov[c]): c for c in pre}
    alts = [mark_formula(cp, {var_cond[v]: val for v, val in p.items()}) for p in pats]
    return conj([mark_formula(cp, base), guard_formula(cp, past(cp.on, pre)), disj(alts)])


# --------------------------------------------------------------------------
# satisfiability.  Condition variables are numbered in reverse prefix order:
# the solver decides the latest conditions first, so Mark(target) and the
# blocking clauses of the successor enumeration cut the search early.  On
# 30-place systems this beats name order by one to two orders of magnitude.

def _cnf(f: Formula, order: Optional[list[str]], extra: Iterable[str] = ()) -> Cnf:
    return to_cnf(f, Cnf(f.variables() | set(extra), order))


def _order(cp: Optional[ColouredPrefix]) -> Optional[list[str]]:
    return [cp.cond_vars[b] for b in reversed(cp.on.conditions)] if cp is not None else None


def check(f: Formula, cp: Optional[ColouredPrefix] = None) -> Optional[dict[str, bool]]:
    cnf = _cnf(f, _order(cp))
    values = solve(cnf)
    if values is None:
        return None
    return {cnf.names[i]: bool(values[i]) for i in range(1, cnf.num_inputs + 1)}


def all_projected_models(f: Formula, keep: list[str], order: Optional[list[str]] = None) -> list[dict[str, bool]]:
    """Every assignment to ``keep`` that extends to a model of ``f`` (blocking-clause enumeration)."""
    cnf = _cnf(f, order, keep)
    out = []
    while True:
        values = solve(cnf)
        if values is None:
            return out
        proj = {v: bool(values[cnf.var(v)]) for v in keep}
        out.append(proj)
        cnf.add(-cnf.var(v) if val else cnf.var(v) for v, val in proj.items())


# --------------------------------------------------------------------------
# successor graph

@dataclass
class SuccessorGraph:
    vertices: list[BaseMarking]
    edges: list[tuple[BaseMarking, BaseMarking]]
    components: list[list[BaseMarking]]  # topologically ordered, initial component first
    minimal: set[int]
    maximal: set[int]
    initial: BaseMarking
    graph: nx.DiGraph

    def component_of(self, base: BaseMarking) -> int:
        for i, comp in enumerate(self.components):
            if base in comp:
                return i
        raise KeyError(base)

    def maximal_components(self) -> list[list[BaseMarking]]:
        return [self.components[i] for i in sorted(self.maximal)]


def initial_base(cp: ColouredPrefix) -> BaseMarking:
    colours = cp.bs.initial.colours()
    return tuple((b, colours[cp.cov[b]]) for b in cp.min_cut)


def successors(cp: ColouredPrefix, base: BaseMarking) -> list[BaseMarking]:
    """Base markings reached by completing a base process from ``base``.

    The max cut folds onto the same places as the min cut, so a colouring
    of the max cut is read back as a base marking place by place.
    """
    place_to_min = {cp.cov[b]: b for b in cp.min_cut}
    maxvars = [cp.cond_vars[b] for b in cp.max_cut]
    f = conj([mark_formula(cp, base), guard_formula(cp, cp.on.events)])
    found = []
    for proj in all_projected_models(f, maxvars, _order(cp)):
        colours = {place_to_min[cp.cov[b]]: proj[cp.cond_vars[b]] for b in cp.max_cut}
        found.append(cp.base_from_colours(colours))
    return sorted(found, key=_base_sort_key)


def _base_sort_key(base: BaseMarking):
    return tuple(not c for _, c in base)


def successor_graph(cp: ColouredPrefix) -> SuccessorGraph:
    if len(cp.min_cut) > MAX_MIN_CUT:
        raise NetError(f"min cut has {len(cp.min_cut)} conditions; base-marking enumeration is capped at {MAX_MIN_CUT}")
    start = initial_base(cp)
    order = [start]
    seen = {start}
    edges = []
    i = 0
    while i < len(order):
        base = order[i]
        i += 1
        for nxt in successors(cp, base):
            edges.append((base, nxt))
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
    g = nx.DiGraph()
    g.add_nodes_from(order)
    g.add_edges_from(edges)
    cond = nx.condensation(g)
    pos = {v: k for k, v in enumerate(order)}
    comps_raw = {c: sorted(cond.nodes[c]["members"], key=pos.__getitem__) for c in cond.nodes}
    topo = list(nx.lexicographical_topological_sort(cond, key=lambda c: pos[comps_raw[c][0]]))
    components = [comps_raw[c] for c in topo]
    index = {c: k for k, c in enumerate(topo)}
    minimal = {index[c] for c in cond.nodes if cond.in_degree(c) == 0}
    maximal = {index[c] for c in cond.nodes if cond.out_degree(c) == 0}
    return SuccessorGraph(order, edges, components, minimal, maximal, start, g)


__all__ = [
    "BaseMarking", "ColouredPrefix", "SuccessorGraph", "all_projected_models", "check", "colour_prefix",
    "dead_formula", "deadlock_patterns", "enabl_formula", "guard_formula", "initial_base", "input_pattern",
    "mark_formula", "reach_formula", "successor_graph", "successors",
]
