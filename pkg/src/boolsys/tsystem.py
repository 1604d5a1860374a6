"""Structural liveness and safeness of T-systems.

A strongly connected T-system is live iff every circuit carries a token,
and live and safe iff additionally every place lies on a circuit holding
exactly one token.  Both questions are answered by graph searches, no
state space is built.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

import networkx as nx

from boolsys.petri import Marking, NetError, PetriNet, is_strongly_connected, is_tnet, node_key, sorted_nodes


class StructuralError(NetError):
    """The net violates a structural precondition (not a T-net, not strongly connected, ...)."""


@dataclass(frozen=True)
class TSystem:
    net: PetriNet
    initial: Marking

    def __post_init__(self):
        if not is_tnet(self.net):
            bad = [p for p in self.net.places if len(self.net.pre(p)) != 1 or len(self.net.post(p)) != 1]
            raise StructuralError(f"not a T-net: places {bad} need exactly one pre- and one post-transition")
        unknown = [p for p in self.initial.support() if p not in self.net.places]
        if unknown:
            raise StructuralError(f"marking refers to unknown places {sorted_nodes(unknown)}")


@dataclass(frozen=True)
class CircuitWitness:
    nodes: tuple[str, ...]  # alternating place/transition sequence starting with a place; closes back on nodes[0]
    token_count: int

    def places(self) -> tuple[str, ...]:
        return self.nodes[::2]

    def __str__(self) -> str:
        return " -> ".join(self.nodes + self.nodes[:1]) + f" ({self.token_count} token(s))"


@dataclass(frozen=True)
class SkeletonCheck:
    live: bool
    safe: bool
    unmarked_circuit: Optional[CircuitWitness] = None
    unsafe_place: Optional[str] = None
    unsafe_circuit: Optional[CircuitWitness] = None

    @property
    def ok(self) -> bool:
        return self.live and self.safe


def _circuit_from_nodes(net: PetriNet, marking: Marking, nodes: list[str]) -> CircuitWitness:
    # rotate so the circuit starts at its smallest place
    places = [x for x in nodes if net.is_place(x)]
    start = nodes.index(min(places, key=node_key))
    nodes = nodes[start:] + nodes[:start]
    return CircuitWitness(tuple(nodes), sum(marking[p] for p in nodes[::2]))


def token_free_circuit(ts: TSystem) -> Optional[CircuitWitness]:
    """A circuit whose places are all unmarked, or None.

    Searches for a cycle in the subgraph spanned by all transitions and the
    unmarked places.
    """
    net, m = ts.net, ts.initial
    g = nx.DiGraph()
    keep = set(net.transitions) | {p for p in net.places if m[p] == 0}
    g.add_nodes_from(sorted_nodes(keep))
    for src, dst in sorted(net.arcs, key=lambda a: (node_key(a[0]), node_key(a[1]))):
        if src in keep and dst in keep:
            g.add_edge(src, dst)
    for comp in sorted((sorted_nodes(c) for c in nx.strongly_connected_components(g)), key=lambda c: node_key(c[0])):
        if len(comp) < 2:
            continue
        sub = g.subgraph(comp)
        start = min((x for x in comp if net.is_place(x)), key=node_key)
        cycle = nx.find_cycle(sub, source=start)
        return _circuit_from_nodes(net, m, [u for u, _ in cycle])
    return None


def min_token_circuit(ts: TSystem, p: str) -> CircuitWitness:
    """Elementary circuit through ``p`` carrying the fewest initial tokens.

    Dijkstra from the post-transition of ``p`` back to ``p``; places weigh
    their initial token count, transitions weigh nothing.  Ties are broken by
    natural node order.
    """
    net, m = ts.net, ts.initial
    if p not in net.places:
        raise StructuralError(f"unknown place {p!r}")
    (t,) = net.post(p)
    dist = {t: 0}
    parent: dict[str, Optional[str]] = {t: None}
    heap = [(0, node_key(t), t)]
    done = set()
    while heap:
        d, _, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        if x == p:
            break
        for y in sorted_nodes(net.post(x)):
            nd = d + (m[y] if net.is_place(y) else 0)
            if y not in dist or nd < dist[y]:
                dist[y] = nd
                parent[y] = x
                heapq.heappush(heap, (nd, node_key(y), y))
    if p not in done:
        raise StructuralError(f"no circuit through {p}; net is not strongly connected")
    path = [p]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    # path runs p <- ... <- t; the circuit is p -> t -> ... -> p
    nodes = [p] + path[:0:-1]
    return CircuitWitness(tuple(nodes), sum(m[q] for q in nodes[::2]))


def check_skeleton(ts: TSystem) -> SkeletonCheck:
    """Decide liveness and safeness of a strongly connected T-system.

    ``safe`` is exact for live systems.  For non-live systems it is the
    structural bound (every place on a circuit with at most one token),
    which is sufficient but not necessary for 1-boundedness.
    """
    if not is_strongly_connected(ts.net):
        raise StructuralError("T-system is not strongly connected")
    unmarked = token_free_circuit(ts)
    unsafe_place = unsafe_circuit = None
    for p in ts.net.places:
        c = min_token_circuit(ts, p)
        if c.token_count > 1:
            unsafe_place, unsafe_circuit = p, c
            break
    return SkeletonCheck(live=unmarked is None, safe=unsafe_place is None,
                         unmarked_circuit=unmarked, unsafe_place=unsafe_place, unsafe_circuit=unsafe_circuit)


def parikh(sequence: Iterable[str], transitions: Iterable[str] = ()) -> dict[str, int]:
    """Occurrence counts of a firing sequence; ``transitions`` seeds zero entries."""
    counts = Counter({t: 0 for t in transitions})
    counts.update(sequence)
    return dict(counts)
