"""Random strongly connected Boolean systems for property tests and benchmarks.

Nets grow from a two-place cycle by local operations that keep every
transition unary or binary: ``seq`` lengthens a place into place,
transition, place; ``fork`` adds a parallel branch between two unary
transitions; ``loop`` adds a branch from a later transition back to an
earlier one; ``cross`` adds a single place between two unary transitions.
"""

from __future__ import annotations

import os
import random
from typing import Optional

from boolsys.boolnet import (
    CLOSING, KINDS, OPENING, UNARY, BooleanSystem, ColouredMarking, LogicalType, TransitionSpec, build_net,
)
from boolsys.petri import Marking, PetriNet, sorted_nodes
from boolsys.tsystem import TSystem, min_token_circuit, token_free_circuit

SEED_ENV = "BOOLSYS_SEED"


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


class _Builder:
    def __init__(self):
        self.places = ["p0", "p1"]
        self.transitions = ["t0", "t1"]
        self.arcs = {("t0", "p0"), ("p0", "t1"), ("t1", "p1"), ("p1", "t0")}

    def new_place(self):
        p = f"p{len(self.places)}"
        self.places.append(p)
        return p

    def new_transition(self):
        t = f"t{len(self.transitions)}"
        self.transitions.append(t)
        return t

    def pre(self, x):
        return [a for a, b in self.arcs if b == x]

    def post(self, x):
        return [b for a, b in self.arcs if a == x]

    def unary(self):
        return [t for t in self.transitions if len(self.pre(t)) == 1 and len(self.post(t)) == 1]

    def seq(self, rng):
        p = rng.choice(self.places)
        (v,) = self.post(p)
        t, q = self.new_transition(), self.new_place()
        self.arcs -= {(p, v)}
        self.arcs |= {(p, t), (t, q), (q, v)}
        return True

    def _link(self, a, b, via_transition):
        if via_transition:
            q1, t, q2 = self.new_place(), self.new_transition(), self.new_place()
            self.arcs |= {(a, q1), (q1, t), (t, q2), (q2, b)}
        else:
            q = self.new_place()
            self.arcs |= {(a, q), (q, b)}

    def link(self, rng, via_transition):
        cands = sorted_nodes(self.unary())
        if len(cands) < 2:
            return False
        a, b = rng.sample(cands, 2)
        # a gains an output, b an input; a must not already feed b directly
        if any(self.post(p) == [b] for p in self.post(a)):
            return False
        self._link(a, b, via_transition)
        return True


def random_net(rng: random.Random, places: int) -> PetriNet:
    """A strongly connected T-system net with exactly ``places`` places (at least 2)."""
    b = _Builder()
    ops = ["seq", "fork", "loop", "cross"]
    weights = [3, 2, 2, 1]
    while len(b.places) < places:
        op = rng.choices(ops, weights)[0]
        if op in ("fork", "loop") and places - len(b.places) < 2:
            op = "seq"
        if op == "seq":
            b.seq(rng)
        else:
            b.link(rng, via_transition=op in ("fork", "loop"))
    return PetriNet(b.places, b.transitions, b.arcs)


def place_tokens(rng: random.Random, net: PetriNet, max_tokens: int = 3, live: bool = True) -> Optional[Marking]:
    """Put tokens so that every circuit is marked and every place stays on a one-token circuit.

    With ``live=False`` the repair stops one step early when possible,
    leaving a token-free circuit.  Returns None when no placement within
    ``max_tokens`` was found.
    """
    tokens = {rng.choice(net.places): 1}
    while True:
        witness = token_free_circuit(TSystem(net, Marking(tokens)))
        if witness is None:
            break
        if not live and len(tokens) >= 1 and rng.random() < 0.5:
            return Marking(tokens)
        options = list(witness.places())
        rng.shuffle(options)
        for p in options:
            trial = Marking({**tokens, p: 1})
            ts = TSystem(net, trial)
            if all(min_token_circuit(ts, q).token_count <= 1 for q in net.places):
                tokens[p] = 1
                break
        else:
            return None
        if len(tokens) > max_tokens:
            return None
    if not live:
        return None
    return Marking(tokens)


def random_system(rng: random.Random, places: int = 8, max_tokens: int = 3, live: bool = True,
                  attempts: int = 200, kinds=KINDS) -> BooleanSystem:
    """A strongly connected Boolean system with safe skeleton; live unless ``live=False``.

    Binary transitions draw their logical type from ``kinds``.
    """
    for _ in range(attempts):
        net = random_net(rng, places)
        m = place_tokens(rng, net, max_tokens, live)
        if m is None:
            continue
        return colour_system(rng, net, m, kinds=kinds)
    raise RuntimeError(f"no suitable system found in {attempts} attempts")


def colour_system(rng: random.Random, net: PetriNet, m: Marking, name: str = "", kinds=KINDS) -> BooleanSystem:
    specs = {}
    for t in net.transitions:
        nin, nout = len(net.pre(t)), len(net.post(t))
        if (nin, nout) == (1, 1):
            specs[t] = TransitionSpec(UNARY)
            continue
        direction = CLOSING if nin == 2 else OPENING
        two = sorted_nodes(net.pre(t) if nin == 2 else net.post(t))
        rng.shuffle(two)
        specs[t] = TransitionSpec(LogicalType(rng.choice(kinds), direction), sides=tuple(two))
    bn = build_net(net, {p: p for p in net.places}, specs)
    marked = sorted_nodes(m.support())
    colours = {p: rng.random() < 0.5 for p in marked}
    if not any(colours.values()):
        colours[rng.choice(marked)] = True
    return BooleanSystem(bn, ColouredMarking.from_colours(colours), name)


def random_tsystem(rng: random.Random, places: int = 8, max_tokens: int = 3) -> TSystem:
    for _ in range(200):
        net = random_net(rng, places)
        m = place_tokens(rng, net, max_tokens)
        if m is not None:
            return TSystem(net, m)
    raise RuntimeError("no live and safe T-system found")


__all__ = ["SEED_ENV", "colour_system", "default_seed", "place_tokens", "random_net", "random_system",
           "random_tsystem"]
