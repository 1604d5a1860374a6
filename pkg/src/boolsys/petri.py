"""Ordinary Petri nets: structure, markings and the firing rule."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import networkx as nx

_DIGITS = re.compile(r"(\d+)")


def node_key(name: str) -> tuple:
    """Sort key that orders identifiers with embedded numbers naturally (A2 < A10)."""
    return tuple((0, int(tok), tok) if tok.isdigit() else (1, 0, tok) for tok in _DIGITS.split(name) if tok)


def sorted_nodes(nodes: Iterable[str]) -> list[str]:
    return sorted(nodes, key=node_key)


class NetError(ValueError):
    """Raised for malformed nets or illegal firing attempts."""


@dataclass(frozen=True)
class PetriNet:
    """A net N = (P, T, F) with unit arc weights.

    Identifiers are plain strings; ``places`` and ``transitions`` are kept
    in natural order so that every iteration over the net is deterministic.
    """

    places: tuple[str, ...]
    transitions: tuple[str, ...]
    arcs: frozenset[tuple[str, str]]
    _pre: dict = field(init=False, repr=False, compare=False, hash=False)
    _post: dict = field(init=False, repr=False, compare=False, hash=False)
    _placeset: frozenset = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, places: Iterable[str], transitions: Iterable[str], arcs: Iterable[tuple[str, str]],
                 *, require_connected: bool = True):
        places = tuple(sorted_nodes(set(places)))
        transitions = tuple(sorted_nodes(set(transitions)))
        arcs = frozenset((str(a), str(b)) for a, b in arcs)
        object.__setattr__(self, "places", places)
        object.__setattr__(self, "transitions", transitions)
        object.__setattr__(self, "arcs", arcs)

        pset, tset = frozenset(places), frozenset(transitions)
        object.__setattr__(self, "_placeset", pset)
        clash = pset & tset
        if clash:
            raise NetError(f"identifiers used as both place and transition: {sorted_nodes(clash)}")
        pre: dict[str, set] = {x: set() for x in places + transitions}
        post: dict[str, set] = {x: set() for x in places + transitions}
        for src, dst in arcs:
            if src not in pre:
                raise NetError(f"arc ({src}, {dst}) has unknown source {src!r}")
            if dst not in pre:
                raise NetError(f"arc ({src}, {dst}) has unknown target {dst!r}")
            if (src in pset) == (dst in pset):
                raise NetError(f"arc ({src}, {dst}) must join a place and a transition")
            post[src].add(dst)
            pre[dst].add(src)
        object.__setattr__(self, "_pre", {k: frozenset(v) for k, v in pre.items()})
        object.__setattr__(self, "_post", {k: frozenset(v) for k, v in post.items()})
        if require_connected and not self.is_connected():
            raise NetError("net is not connected")

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.places + self.transitions

    def is_place(self, node: str) -> bool:
        return node in self._placeset

    def pre(self, node: str) -> frozenset[str]:
        try:
            return self._pre[node]
        except KeyError:
            raise NetError(f"unknown node {node!r}") from None

    def post(self, node: str) -> frozenset[str]:
        try:
            return self._post[node]
        except KeyError:
            raise NetError(f"unknown node {node!r}") from None

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.arcs)
        return g

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        return nx.is_weakly_connected(self.graph())


@dataclass(frozen=True)
class Marking:
    """Token counts per place.  Places absent from ``tokens`` hold zero tokens."""

    tokens: tuple[tuple[str, int], ...]
    _map: dict = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, tokens: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = dict(tokens)
        for p, n in items.items():
            if not isinstance(n, int) or n < 0:
                raise NetError(f"token count for {p!r} must be a natural number, got {n!r}")
        tokens = tuple(sorted(((p, n) for p, n in items.items() if n), key=lambda x: node_key(x[0])))
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "_map", dict(tokens))

    def __getitem__(self, place: str) -> int:
        return self._map.get(place, 0)

    def as_dict(self) -> dict[str, int]:
        return dict(self._map)

    def support(self) -> frozenset[str]:
        return frozenset(p for p, n in self.tokens if n > 0)

    def total(self) -> int:
        return sum(n for _, n in self.tokens)

    @classmethod
    def from_places(cls, places: Iterable[str]) -> "Marking":
        return cls(Counter(places))

    def __str__(self) -> str:
        return "{" + ", ".join(p if n == 1 else f"{p}:{n}" for p, n in self.tokens) + "}"


def preset(net: PetriNet, node: str) -> frozenset[str]:
    return net.pre(node)


def postset(net: PetriNet, node: str) -> frozenset[str]:
    return net.post(node)


def enabled(net: PetriNet, m: Marking, t: str) -> bool:
    return all(m[p] >= 1 for p in net.pre(t))


def fire(net: PetriNet, m: Marking, t: str) -> Marking:
    """Fire ``t`` at ``m``: one token from each pre-place, one onto each post-place."""
    if t not in net.transitions:
        raise NetError(f"unknown transition {t!r}")
    tokens = m.as_dict()
    missing = sorted_nodes(p for p in net.pre(t) if tokens.get(p, 0) < 1)
    if missing:
        raise NetError(f"transition {t} is not enabled: unmarked pre-places {missing}")
    for p in net.pre(t):
        tokens[p] -= 1
    for p in net.post(t):
        tokens[p] = tokens.get(p, 0) + 1
    return Marking(tokens)


def is_strongly_connected(net: PetriNet) -> bool:
    if not net.nodes:
        return True
    return nx.is_strongly_connected(net.graph())


def is_tnet(net: PetriNet) -> bool:
    return all(len(net.pre(p)) == 1 and len(net.post(p)) == 1 for p in net.places)


def reachable_markings(net: PetriNet, m0: Marking, cap: int = 1 << 20) -> dict[Marking, list[tuple[str, Marking]]]:
    """Explicit reachability graph as an adjacency map.  Raises once ``cap`` markings are exceeded."""
    graph: dict[Marking, list[tuple[str, Marking]]] = {}
    stack = [m0]
    while stack:
        m = stack.pop()
        if m in graph:
            continue
        if len(graph) >= cap:
            raise NetError(f"state space exceeds cap of {cap} markings")
        succ = []
        for t in net.transitions:
            if enabled(net, m, t):
                m2 = fire(net, m, t)
                succ.append((t, m2))
                if m2 not in graph:
                    stack.append(m2)
        graph[m] = succ
    return graph
