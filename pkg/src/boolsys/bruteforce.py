"""Explicit state-space oracles used to cross-check the SAT-based verdicts."""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from boolsys.boolnet import (
    BindingElement, BooleanSystem, ColouredMarking, bindings_of, colour_graph, enabled_bindings,
)
from boolsys.petri import Marking, reachable_markings
from boolsys.tsystem import TSystem

CAP = 1 << 20


def _bottom_sccs(graph: dict) -> list[set]:
    g = nx.DiGraph()
    g.add_nodes_from(graph)
    for m, succ in graph.items():
        g.add_edges_from((m, m2) for _, m2 in succ)
    cond = nx.condensation(g)
    return [set(cond.nodes[c]["members"]) for c in cond.nodes if cond.out_degree(c) == 0]


def skeleton_live(ts: TSystem, cap: int = CAP) -> bool:
    """Every transition can fire again from every reachable marking."""
    graph = reachable_markings(ts.net, ts.initial, cap)
    for comp in _bottom_sccs(graph):
        fired = {t for m in comp for t, _ in graph[m]}
        if set(ts.net.transitions) - fired:
            return False
    return True


def skeleton_safe(ts: TSystem, cap: int = CAP) -> bool:
    graph = reachable_markings(ts.net, ts.initial, cap)
    return all(n <= 1 for m in graph for _, n in m.tokens)


def skeleton_reachable(ts: TSystem, cap: int = CAP) -> set[Marking]:
    return set(reachable_markings(ts.net, ts.initial, cap))


@dataclass
class ColouredAnalysis:
    """Verdicts read off the explicit coloured reachability graph."""

    markings: int
    deadlock_transitions: set[str]
    non_live_bindings: set[tuple[str, tuple[int, ...]]]
    non_high_live_transitions: set[str]
    dead_marking_reachable: bool
    safe: bool

    @property
    def deadlock_free(self) -> bool:
        return not self.deadlock_transitions

    @property
    def high_live(self) -> bool:
        return not self.non_high_live_transitions

    @property
    def well_behaved(self) -> bool:
        return self.safe and not self.non_live_bindings


def analyse_colours(bs: BooleanSystem, cap: int = CAP) -> ColouredAnalysis:
    bn = bs.bnet
    graph = colour_graph(bs, cap)
    table = {t: bindings_of(bn, t) for t in bn.transitions}

    deadlocks = set()
    dead = False
    for m in graph:
        if not graph[m]:
            dead = True
        skel = m.skeleton()
        for t in bn.transitions:
            if t in deadlocks:
                continue
            if all(skel[p] >= 1 for p in bn.net.pre(t)) and not enabled_bindings(bn, m, t, table):
                deadlocks.add(t)

    bottoms = _bottom_sccs(graph)
    non_live: set[tuple[str, tuple[int, ...]]] = set()
    non_high: set[str] = set()
    for t in bn.transitions:
        high = [be for be in table[t] if be.is_high]
        for be in high:
            for comp in bottoms:
                if not any(_enabled(bn, m, be) for m in comp):
                    non_live.add((t, be.bits()))
                    break
        for comp in bottoms:
            if not any(_enabled(bn, m, be) for m in comp for be in high):
                non_high.add(t)
                break
    safe = all(h + l <= 1 for m in graph for _, h, l in m.tokens)
    return ColouredAnalysis(len(graph), deadlocks, non_live, non_high, dead, safe)


def _enabled(bn, m: ColouredMarking, be: BindingElement) -> bool:
    b = be.as_dict()
    for p in bn.in_places(be.transition):
        if (m.high(p) if b[bn.var(p)] else m.low(p)) < 1:
            return False
    return True


def strongly_connected_ok(bs: BooleanSystem) -> bool:
    return nx.is_strongly_connected(bs.net.graph())


__all__ = [
    "CAP", "ColouredAnalysis", "analyse_colours", "skeleton_live", "skeleton_reachable", "skeleton_safe",
    "strongly_connected_ok",
]
