"""Boolean nets and systems: guards, bindings and the coloured firing rule.

Every place of a Boolean net is unbranched and carries one variable; both
arcs touching the place are annotated with it.  A marking assigns each
place a number of high and low tokens.  A binding of a transition is a
model of its guard over the variables of the adjacent places; firing it
consumes tokens of the colours the binding prescribes for the pre-places
and produces the prescribed colours on the post-places.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from boolsys.logic import FRESH_PREFIX, And, Formula, Not, Or, Var, Xor, eval_formula, models
from boolsys.petri import Marking, NetError, PetriNet, node_key, sorted_nodes
from boolsys.tsystem import StructuralError, TSystem

KINDS = ("AND", "XOR", "OR", "AND_XOR", "XOR_AND")
OPENING, CLOSING = "opening", "closing"


@dataclass(frozen=True)
class LogicalType:
    """A binary connector type (AND, XOR, AND_XOR, XOR_AND, OR) with its direction.

    The unary type has kind UNARY and no direction.
    """

    kind: str
    direction: Optional[str] = None

    def __post_init__(self):
        if self.kind == "UNARY":
            if self.direction is not None:
                raise ValueError("unary transitions have no direction")
        elif self.kind not in KINDS:
            raise ValueError(f"unknown logical type {self.kind!r}; expected one of {KINDS + ('UNARY',)}")
        elif self.direction not in (OPENING, CLOSING):
            raise ValueError(f"binary type {self.kind} needs direction 'opening' or 'closing'")

    @property
    def is_unary(self) -> bool:
        return self.kind == "UNARY"

    @property
    def is_closing(self) -> bool:
        return self.direction == CLOSING

    @property
    def is_opening(self) -> bool:
        return self.direction == OPENING

    @property
    def label(self) -> str:
        return "UNARY" if self.is_unary else f"{self.direction.upper()} {self.kind}"

    @classmethod
    def parse(cls, text: str, direction: Optional[str] = None) -> "LogicalType":
        """Accepts ``"closing OR"``, ``"CLOSING_OR"``, ``"OR"`` plus a separate direction, or ``"unary"``."""
        parts = text.replace("-", " ").split()
        if len(parts) == 1 and parts[0].upper().startswith(("OPENING_", "CLOSING_")):
            head, _, rest = parts[0].partition("_")
            parts = [head, rest]
        if len(parts) == 2:
            direction, kind = parts[0].lower(), parts[1].upper()
        elif len(parts) == 1:
            kind = parts[0].upper()
        else:
            raise ValueError(f"cannot parse logical type {text!r}")
        if kind == "UNARY":
            return cls("UNARY")
        return cls(kind, direction.lower() if direction else None)

    def __str__(self) -> str:
        return self.label


UNARY = LogicalType("UNARY")


def _none_high(*fs: Formula) -> Formula:
    return Not(Or(fs))


def standard_guard(lt: LogicalType, in_vars: Sequence[str], out_vars: Sequence[str]) -> Formula:
    """The guard of a unary or binary transition of logical type ``lt``.

    X and Y are bound to the variables on the two-arc side in the given
    order, Z to the single variable on the other side.
    """
    in_vars, out_vars = list(in_vars), list(out_vars)
    if lt.is_unary:
        if len(in_vars) != 1 or len(out_vars) != 1:
            raise ValueError(f"unary guard needs 1 input and 1 output, got {len(in_vars)}/{len(out_vars)}")
        x, z = Var(in_vars[0]), Var(out_vars[0])
        return Or((And((x, z)), _none_high(x, z)))
    if lt.is_closing:
        if len(in_vars) != 2 or len(out_vars) != 1:
            raise ValueError(f"closing guard needs 2 inputs and 1 output, got {len(in_vars)}/{len(out_vars)}")
        two, one = in_vars, out_vars[0]
    else:
        if len(in_vars) != 1 or len(out_vars) != 2:
            raise ValueError(f"opening guard needs 1 input and 2 outputs, got {len(in_vars)}/{len(out_vars)}")
        two, one = out_vars, in_vars[0]
    x, y, z = Var(two[0]), Var(two[1]), Var(one)
    body = {
        "AND": And((x, y)),
        "XOR": Xor(x, y),
        "OR": Or((x, y)),
        "AND_XOR": Or((And((x, y)), And((x, Not(y))))),
        "XOR_AND": Or((And((x, y)), And((Not(x), y)))),
    }[lt.kind]
    if lt.kind == "AND":
        high = And((x, y, z))
    else:
        high = And((body, z))
    return Or((high, _none_high(x, y, z)))


@dataclass(frozen=True)
class TransitionSpec:
    """How a transition's guard is given: a logical type (with optional X/Y order) or explicit text."""

    type: Optional[LogicalType] = None
    sides: Optional[tuple[str, str]] = None  # places bound to X and Y
    guard: Optional[Formula] = None


class BooleanNet:
    """A Boolean net BN = (N, X, G) over a net with unbranched places.

    ``place_vars`` names the variable of every place; the variables of the
    two arcs at a place coincide with it.  ``roles`` records, for typed
    transitions, which variables play X, Y and Z in the standard guard.
    """

    def __init__(self, net: PetriNet, place_vars: Mapping[str, str], guards: Mapping[str, Formula],
                 types: Optional[Mapping[str, LogicalType]] = None,
                 roles: Optional[Mapping[str, tuple[str, ...]]] = None):
        self.net = net
        missing = [p for p in net.places if p not in place_vars]
        if missing:
            raise NetError(f"places without variable: {missing}")
        self.place_vars = {p: place_vars[p] for p in net.places}
        seen: dict[str, str] = {}
        for p, v in self.place_vars.items():
            if v.startswith(FRESH_PREFIX):
                raise NetError(f"variable {v!r} of place {p} uses the reserved prefix {FRESH_PREFIX!r}")
            if v in seen:
                raise NetError(f"places {seen[v]} and {p} share variable {v!r}")
            seen[v] = p
        self.var_place = seen
        for p in net.places:
            if len(net.pre(p)) > 1 or len(net.post(p)) > 1:
                raise NetError(f"place {p} is branched; Boolean nets need unbranched places")
            if net.pre(p) and net.pre(p) == net.post(p):
                raise NetError(f"place {p} is both pre- and post-place of {next(iter(net.pre(p)))}")
        unknown = set(guards) - set(net.transitions)
        if unknown:
            raise NetError(f"guards for unknown transitions {sorted_nodes(unknown)}")
        self.types: dict[str, LogicalType] = dict(types or {})
        self.roles: dict[str, tuple[str, ...]] = dict(roles or {})
        self.guards: dict[str, Formula] = {}
        for t in net.transitions:
            if t not in guards:
                raise NetError(f"transition {t} has no guard")
            g = guards[t]
            stray = g.variables() - set(self.adjacent_vars(t))
            if stray:
                raise NetError(f"guard of {t} mentions variables {sorted_nodes(stray)} not on its arcs")
            self.guards[t] = g

    # -- structure ----------------------------------------------------------

    @property
    def places(self):
        return self.net.places

    @property
    def transitions(self):
        return self.net.transitions

    def var(self, place: str) -> str:
        return self.place_vars[place]

    @property
    def arc_vars(self) -> dict[tuple[str, str], str]:
        return {(a, b): self.place_vars[a if self.net.is_place(a) else b] for a, b in self.net.arcs}

    def in_places(self, t: str) -> list[str]:
        return sorted(self.net.pre(t), key=lambda p: node_key(self.place_vars[p]))

    def out_places(self, t: str) -> list[str]:
        return sorted(self.net.post(t), key=lambda p: node_key(self.place_vars[p]))

    def in_vars(self, t: str) -> list[str]:
        if t in self.roles:
            lt = self.types[t]
            if lt.is_unary:
                return [self.roles[t][0]]
            return list(self.roles[t][:2]) if lt.is_closing else [self.roles[t][2]]
        return [self.place_vars[p] for p in self.in_places(t)]

    def out_vars(self, t: str) -> list[str]:
        if t in self.roles:
            lt = self.types[t]
            if lt.is_unary:
                return [self.roles[t][1]]
            return [self.roles[t][2]] if lt.is_closing else list(self.roles[t][:2])
        return [self.place_vars[p] for p in self.out_places(t)]

    def adjacent_vars(self, t: str) -> list[str]:
        return self.in_vars(t) + self.out_vars(t)

    def binding_vars(self, t: str) -> list[str]:
        """Variable order used to list bindings: (X, Y, Z) for typed binary transitions."""
        if t in self.roles:
            return list(self.roles[t])
        return self.adjacent_vars(t)

    def report_vars(self, t: str) -> list[str]:
        """Arc variables as printed in reports: inputs first, then outputs."""
        return self.in_vars(t) + self.out_vars(t)

    def type_label(self, t: str) -> str:
        lt = self.types.get(t)
        return lt.label if lt else "CUSTOM"


def build_net(net: PetriNet, place_vars: Mapping[str, str], specs: Mapping[str, TransitionSpec]) -> BooleanNet:
    """Assemble a Boolean net, generating standard guards for typed transitions."""
    guards, types, roles = {}, {}, {}
    for t in net.transitions:
        spec = specs.get(t)
        if spec is None:
            raise NetError(f"transition {t} has neither a type nor a guard")
        if spec.guard is not None:
            guards[t] = spec.guard
            if spec.type is not None:
                types[t] = spec.type
            continue
        lt = spec.type
        pre = sorted_nodes(net.pre(t))
        post = sorted_nodes(net.post(t))
        two_side = pre if lt.is_closing else post
        if spec.sides is not None:
            if lt.is_unary or sorted_nodes(spec.sides) != sorted_nodes(two_side):
                raise NetError(f"sides {list(spec.sides)} of {t} do not match its two-arc side {two_side}")
            two_side = list(spec.sides)
        else:
            two_side = sorted(two_side, key=lambda p: node_key(place_vars[p]))
        if lt.is_unary:
            ins, outs = pre, post
        elif lt.is_closing:
            ins, outs = two_side, post
        else:
            ins, outs = pre, two_side
        try:
            g = standard_guard(lt, [place_vars[p] for p in ins], [place_vars[p] for p in outs])
        except ValueError as exc:
            raise NetError(f"transition {t}: {exc}") from None
        guards[t] = g
        types[t] = lt
        if lt.is_unary:
            roles[t] = (place_vars[ins[0]], place_vars[outs[0]])
        elif lt.is_closing:
            roles[t] = (place_vars[ins[0]], place_vars[ins[1]], place_vars[outs[0]])
        else:
            roles[t] = (place_vars[outs[0]], place_vars[outs[1]], place_vars[ins[0]])
    return BooleanNet(net, place_vars, guards, types, roles)


@dataclass(frozen=True)
class BindingElement:
    transition: str
    binding: tuple[tuple[str, bool], ...]

    @classmethod
    def of(cls, t: str, values: Mapping[str, bool], order: Sequence[str]) -> "BindingElement":
        return cls(t, tuple((v, bool(values[v])) for v in order))

    def as_dict(self) -> dict[str, bool]:
        return dict(self.binding)

    def __getitem__(self, var: str) -> bool:
        return self.as_dict()[var]

    @property
    def is_low(self) -> bool:
        return not any(v for _, v in self.binding)

    @property
    def is_high(self) -> bool:
        return not self.is_low

    def bits(self) -> tuple[int, ...]:
        return tuple(int(v) for _, v in self.binding)

    def __str__(self) -> str:
        return f"({self.transition}, {''.join(map(str, self.bits()))})"


def bindings_of(bn: BooleanNet, t: str) -> list[BindingElement]:
    if t not in bn.guards:
        raise NetError(f"unknown transition {t!r}")
    order = bn.binding_vars(t)
    return [BindingElement.of(t, m, order) for m in models(bn.guards[t], order)]


def validate_transition(bn: BooleanNet, t: str) -> list[str]:
    """Violations of the binding requirements for ``t`` (empty when the guard is admissible)."""
    out: list[str] = []
    ins, outs = bn.in_vars(t), bn.out_vars(t)
    shape = (len(ins), len(outs))
    if shape not in ((1, 1), (2, 1), (1, 2)):
        out.append(f"{t}: only unary and binary transitions are supported, got {shape[0]} in / {shape[1]} out")
    bs = bindings_of(bn, t)
    if not any(b.is_low for b in bs):
        out.append(f"{t}: low binding missing (guard false when all variables are low)")
    high = [b.as_dict() for b in bs if b.is_high]
    for b in high:
        bits = "".join(str(int(b[v])) for v in bn.binding_vars(t))
        if not any(b[v] for v in ins):
            out.append(f"{t}: not faithful, high binding {bits} has only low inputs")
        if not any(b[v] for v in outs):
            out.append(f"{t}: not faithful, high binding {bits} has only low outputs")
    for i in ins:
        for j in outs:
            if not any(b[i] and b[j] for b in high):
                out.append(f"{t}: not fair, no high binding sets both {i} and {j}")
    return out


def validate_net(bn: BooleanNet) -> list[str]:
    return [v for t in bn.transitions for v in validate_transition(bn, t)]


@dataclass(frozen=True)
class ColouredMarking:
    """High and low token counts per place; only nonempty places are stored."""

    tokens: tuple[tuple[str, int, int], ...]
    _map: dict = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, tokens: Mapping[str, tuple[int, int]] | Iterable[tuple[str, int, int]] = ()):
        if isinstance(tokens, Mapping):
            items = [(p, h, l) for p, (h, l) in tokens.items()]
        else:
            items = list(tokens)
        for p, h, l in items:
            if h < 0 or l < 0:
                raise NetError(f"negative token count on {p}")
        norm = tuple(sorted(((p, h, l) for p, h, l in items if h or l), key=lambda x: node_key(x[0])))
        object.__setattr__(self, "tokens", norm)
        object.__setattr__(self, "_map", {p: (h, l) for p, h, l in norm})

    @classmethod
    def from_colours(cls, colours: Mapping[str, bool]) -> "ColouredMarking":
        """One token per listed place: high for True, low for False."""
        return cls({p: (1, 0) if c else (0, 1) for p, c in colours.items()})

    def high(self, p: str) -> int:
        return self._map.get(p, (0, 0))[0]

    def low(self, p: str) -> int:
        return self._map.get(p, (0, 0))[1]

    def support(self) -> frozenset[str]:
        return frozenset(self._map)

    def colours(self) -> dict[str, bool]:
        """Colour per marked place; only meaningful for safe markings."""
        out = {}
        for p, h, l in self.tokens:
            if h + l != 1:
                raise NetError(f"place {p} holds {h + l} tokens; colours are defined for safe markings")
            out[p] = bool(h)
        return out

    def has_high(self) -> bool:
        return any(h for _, h, _ in self.tokens)

    def skeleton(self) -> Marking:
        return Marking({p: h + l for p, h, l in self.tokens})

    def __str__(self) -> str:
        parts = []
        for p, h, l in self.tokens:
            parts += [f"{p}+"] * h + [f"{p}-"] * l
        return "{" + ", ".join(parts) + "}"


@dataclass(frozen=True)
class BooleanSystem:
    bnet: BooleanNet
    initial: ColouredMarking
    name: str = ""

    def __post_init__(self):
        unknown = [p for p in self.initial.support() if p not in self.bnet.places]
        if unknown:
            raise NetError(f"initial marking refers to unknown places {sorted_nodes(unknown)}")
        if not self.initial.has_high():
            raise NetError("initial marking needs at least one high token")

    @property
    def net(self) -> PetriNet:
        return self.bnet.net


def _missing_colours(bn: BooleanNet, m: ColouredMarking, be: BindingElement):
    b = be.as_dict()
    missing = []
    for p in bn.in_places(be.transition):
        want_high = b[bn.var(p)]
        have = m.high(p) if want_high else m.low(p)
        if have < 1:
            missing.append((p, "high" if want_high else "low", (m.high(p), m.low(p))))
    return missing


def is_enabled(bn: BooleanNet, m: ColouredMarking, be: BindingElement) -> bool:
    return not _missing_colours(bn, m, be)


def fire_binding(bs: BooleanSystem | BooleanNet, m: ColouredMarking, be: BindingElement) -> ColouredMarking:
    bn = bs.bnet if isinstance(bs, BooleanSystem) else bs
    t = be.transition
    if t not in bn.guards:
        raise NetError(f"unknown transition {t!r}")
    b = be.as_dict()
    if set(b) != set(bn.adjacent_vars(t)) or not eval_formula(bn.guards[t], b):
        raise NetError(f"{be} is not a binding of {t}")
    missing = _missing_colours(bn, m, be)
    if missing:
        detail = ", ".join(f"{p} needs {c} (has {h} high, {l} low)" for p, c, (h, l) in missing)
        raise NetError(f"{be} is not enabled: {detail}")
    tokens = {p: [h, l] for p, h, l in m.tokens}
    for p in bn.in_places(t):
        tokens[p][0 if b[bn.var(p)] else 1] -= 1
    for p in bn.out_places(t):
        tokens.setdefault(p, [0, 0])[0 if b[bn.var(p)] else 1] += 1
    return ColouredMarking({p: (h, l) for p, (h, l) in tokens.items()})


def enabled_bindings(bn: BooleanNet, m: ColouredMarking, t: str,
                     table: Optional[Mapping[str, list[BindingElement]]] = None) -> list[BindingElement]:
    options = table[t] if table is not None else bindings_of(bn, t)
    return [be for be in options if is_enabled(bn, m, be)]


def skeleton_of(bs: BooleanSystem) -> TSystem:
    return TSystem(bs.net, bs.initial.skeleton())


def colour_graph(bs: BooleanSystem, cap: int = 1 << 20) -> dict[ColouredMarking, list[tuple[BindingElement, ColouredMarking]]]:
    """Explicit coloured reachability graph, explored breadth first."""
    bn = bs.bnet
    table = {t: bindings_of(bn, t) for t in bn.transitions}
    graph: dict[ColouredMarking, list] = {}
    queue = deque([bs.initial])
    seen = {bs.initial}
    while queue:
        m = queue.popleft()
        succ = []
        for t in bn.transitions:
            for be in enabled_bindings(bn, m, t, table):
                m2 = fire_binding(bn, m, be)
                succ.append((be, m2))
                if m2 not in seen:
                    if len(seen) >= cap:
                        raise NetError(f"coloured state space exceeds cap of {cap} markings")
                    seen.add(m2)
                    queue.append(m2)
        graph[m] = succ
    return graph


def brute_force_reach(bs: BooleanSystem, cap: int = 1 << 20) -> set[ColouredMarking]:
    """All coloured markings reachable from the initial one (exhaustive interleaving search)."""
    return set(colour_graph(bs, cap))


__all__ = [
    "BindingElement", "BooleanNet", "BooleanSystem", "CLOSING", "ColouredMarking", "KINDS", "LogicalType",
    "OPENING", "StructuralError", "TransitionSpec", "UNARY", "bindings_of", "brute_force_reach", "build_net",
    "colour_graph", "enabled_bindings", "fire_binding", "is_enabled", "skeleton_of", "standard_guard",
    "validate_net", "validate_transition",
]
