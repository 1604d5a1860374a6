"""Propositional formulas, CNF conversion and a small deterministic SAT solver."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from boolsys.petri import node_key

#: Names starting with this prefix are reserved for auxiliary CNF variables.
FRESH_PREFIX = "__cnf"
MAX_ENUM_VARS = 20
#: Conjuncts over at most this many variables are encoded by their truth table.
SMALL_CONJUNCT = 4


class FormulaError(ValueError):
    pass


class Formula:
    """Base class of formula nodes.  Nodes are immutable and compare structurally."""

    __slots__ = ()

    def variables(self) -> frozenset[str]:
        raise NotImplementedError

    def __and__(self, other: "Formula") -> "Formula":
        return And((self, other))

    def __or__(self, other: "Formula") -> "Formula":
        return Or((self, other))

    def __invert__(self) -> "Formula":
        return Not(self)

    def __xor__(self, other: "Formula") -> "Formula":
        return Xor(self, other)

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, repr=False)
class Var(Formula):
    name: str

    def variables(self):
        return frozenset((self.name,))

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, repr=False)
class Const(Formula):
    value: bool

    def variables(self):
        return frozenset()

    def __repr__(self):
        return f"Const({self.value})"


@dataclass(frozen=True, repr=False)
class Not(Formula):
    arg: Formula

    def variables(self):
        return self.arg.variables()

    def __repr__(self):
        return f"Not({self.arg!r})"


@dataclass(frozen=True, repr=False)
class And(Formula):
    args: tuple[Formula, ...]

    def __init__(self, args: Iterable[Formula]):
        object.__setattr__(self, "args", tuple(args))

    def variables(self):
        return frozenset().union(*(a.variables() for a in self.args))

    def __repr__(self):
        return f"And({list(self.args)!r})"


@dataclass(frozen=True, repr=False)
class Or(Formula):
    args: tuple[Formula, ...]

    def __init__(self, args: Iterable[Formula]):
        object.__setattr__(self, "args", tuple(args))

    def variables(self):
        return frozenset().union(*(a.variables() for a in self.args))

    def __repr__(self):
        return f"Or({list(self.args)!r})"


@dataclass(frozen=True, repr=False)
class Xor(Formula):
    left: Formula
    right: Formula

    def variables(self):
        return self.left.variables() | self.right.variables()

    def __repr__(self):
        return f"Xor({self.left!r}, {self.right!r})"


TRUE = Const(True)
FALSE = Const(False)
Assignment = Mapping[str, bool]


def conj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return TRUE
    return parts[0] if len(parts) == 1 else And(parts)


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    return parts[0] if len(parts) == 1 else Or(parts)


def literal(name: str, value: bool) -> Formula:
    return Var(name) if value else Not(Var(name))


def eval_formula(f: Formula, a: Assignment) -> bool:
    if isinstance(f, Var):
        try:
            return bool(a[f.name])
        except KeyError:
            raise FormulaError(f"unbound variable {f.name!r}") from None
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not eval_formula(f.arg, a)
    if isinstance(f, And):
        return all(eval_formula(g, a) for g in f.args)
    if isinstance(f, Or):
        return any(eval_formula(g, a) for g in f.args)
    if isinstance(f, Xor):
        return eval_formula(f.left, a) != eval_formula(f.right, a)
    raise TypeError(f"not a formula: {f!r}")


def models(f: Formula, variables: Sequence[str] | None = None) -> list[dict[str, bool]]:
    """All satisfying assignments over ``variables`` in lexicographic order of the truth vector (0 < 1)."""
    if variables is None:
        variables = sorted(f.variables(), key=node_key)
    variables = list(variables)
    missing = f.variables() - set(variables)
    if missing:
        raise FormulaError(f"variable list misses {sorted(missing)}")
    if len(variables) > MAX_ENUM_VARS:
        raise FormulaError(f"refusing to enumerate {len(variables)} variables (bound {MAX_ENUM_VARS})")
    out = []
    for values in itertools.product((False, True), repeat=len(variables)):
        a = dict(zip(variables, values))
        if eval_formula(f, a):
            out.append(a)
    return out


def rename(f: Formula, mapping: Mapping[str, str]) -> Formula:
    if isinstance(f, Var):
        return Var(mapping.get(f.name, f.name))
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return Not(rename(f.arg, mapping))
    if isinstance(f, And):
        return And(rename(g, mapping) for g in f.args)
    if isinstance(f, Or):
        return Or(rename(g, mapping) for g in f.args)
    if isinstance(f, Xor):
        return Xor(rename(f.left, mapping), rename(f.right, mapping))
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# CNF

class Cnf:
    """Clause set over integer literals with a name table.

    Input variables are numbered first, in natural name order unless an
    explicit ``order`` is given (names in ``order`` come first, in that
    order); auxiliary variables introduced by the encoding follow.  The
    solver branches in numbering order.
    """

    def __init__(self, input_vars: Iterable[str], order: Optional[Sequence[str]] = None):
        self.names: list[str] = [""]
        self.index: dict[str, int] = {}
        self.clauses: list[tuple[int, ...]] = []
        pending = set(input_vars)
        ranked = [v for v in dict.fromkeys(order or ()) if v in pending]
        for v in ranked + sorted(pending - set(ranked), key=node_key):
            if v.startswith(FRESH_PREFIX):
                raise FormulaError(f"variable {v!r} uses the reserved prefix {FRESH_PREFIX!r}")
            self._new(v)
        self.num_inputs = len(self.names) - 1

    def _new(self, name: str) -> int:
        self.names.append(name)
        self.index[name] = len(self.names) - 1
        return len(self.names) - 1

    def fresh(self) -> int:
        return self._new(f"{FRESH_PREFIX}{len(self.names)}")

    @property
    def num_vars(self) -> int:
        return len(self.names) - 1

    def var(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise FormulaError(f"variable {name!r} not in clause set") from None

    def add(self, clause: Iterable[int]):
        lits = set(clause)
        if any(-x in lits for x in lits):
            return  # tautology
        self.clauses.append(tuple(sorted(lits, key=lambda x: (abs(x), x))))

    def add_named(self, lits: Iterable[tuple[str, bool]]):
        self.add(self.var(n) if v else -self.var(n) for n, v in lits)

    def copy(self) -> "Cnf":
        c = Cnf.__new__(Cnf)
        c.names = list(self.names)
        c.index = dict(self.index)
        c.clauses = list(self.clauses)
        c.num_inputs = self.num_inputs
        return c

    def as_sets(self) -> set[frozenset[int]]:
        return {frozenset(c) for c in self.clauses}


def _flatten_and(f: Formula) -> Iterator[Formula]:
    if isinstance(f, And):
        for g in f.args:
            yield from _flatten_and(g)
    else:
        yield f


def _encode_truth_table(cnf: Cnf, f: Formula):
    vs = sorted(f.variables(), key=node_key)
    for values in itertools.product((False, True), repeat=len(vs)):
        a = dict(zip(vs, values))
        if not eval_formula(f, a):
            cnf.add(-cnf.var(v) if val else cnf.var(v) for v, val in a.items())


def _tseitin(cnf: Cnf, f: Formula) -> int:
    """Literal equivalent to ``f`` (full equivalence, so models project exactly)."""
    if isinstance(f, Var):
        return cnf.var(f.name)
    if isinstance(f, Const):
        x = cnf.fresh()
        cnf.add([x] if f.value else [-x])
        return x
    if isinstance(f, Not):
        return -_tseitin(cnf, f.arg)
    if isinstance(f, (And, Or)):
        lits = [_tseitin(cnf, g) for g in f.args]
        x = cnf.fresh()
        if isinstance(f, And):
            for lit in lits:
                cnf.add([-x, lit])
            cnf.add([x] + [-lit for lit in lits])
        else:
            for lit in lits:
                cnf.add([x, -lit])
            cnf.add([-x] + lits)
        return x
    if isinstance(f, Xor):
        a, b = _tseitin(cnf, f.left), _tseitin(cnf, f.right)
        x = cnf.fresh()
        cnf.add([-x, a, b])
        cnf.add([-x, -a, -b])
        cnf.add([x, -a, b])
        cnf.add([x, a, -b])
        return x
    raise TypeError(f"not a formula: {f!r}")


def to_cnf(f: Formula, cnf: Optional[Cnf] = None) -> Cnf:
    """Equisatisfiable clause set; every model projects onto a model of ``f`` and back.

    Top-level conjuncts are asserted separately; small ones are encoded by
    their truth table, larger ones with fresh variables.
    """
    if cnf is None:
        cnf = Cnf(f.variables())
    for g in _flatten_and(f):
        if isinstance(g, Const):
            if not g.value:
                cnf.clauses.append(())
        elif isinstance(g, Var):
            cnf.add([cnf.var(g.name)])
        elif isinstance(g, Not) and isinstance(g.arg, Var):
            cnf.add([-cnf.var(g.arg.name)])
        elif len(g.variables()) <= SMALL_CONJUNCT:
            _encode_truth_table(cnf, g)
        else:
            cnf.add([_tseitin(cnf, g)])
    return cnf


# --------------------------------------------------------------------------
# DPLL with two watched literals.  Branches on the smallest unassigned
# variable index, trying false first, so results are reproducible.

def solve(cnf: Cnf) -> Optional[list[Optional[bool]]]:
    n = cnf.num_vars
    value: list[Optional[bool]] = [None] * (n + 1)
    clauses: list[list[int]] = []
    units: list[int] = []
    for c in cnf.clauses:
        if not c:
            return None
        if len(c) == 1:
            units.append(c[0])
        else:
            clauses.append(list(c))
    watches: dict[int, list[int]] = {}
    for i, c in enumerate(clauses):
        watches.setdefault(c[0], []).append(i)
        watches.setdefault(c[1], []).append(i)

    trail: list[int] = []

    def lit_value(lit: int) -> Optional[bool]:
        v = value[abs(lit)]
        if v is None:
            return None
        return v if lit > 0 else not v

    def assign(lit: int) -> bool:
        cur = lit_value(lit)
        if cur is not None:
            return cur
        value[abs(lit)] = lit > 0
        trail.append(lit)
        return True

    def propagate(start: int) -> bool:
        i = start
        while i < len(trail):
            false_lit = -trail[i]
            i += 1
            watching = watches.get(false_lit)
            if not watching:
                continue
            keep = []
            conflict = False
            for k, ci in enumerate(watching):
                if conflict:
                    keep.append(ci)
                    continue
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                if lit_value(c[0]) is True:
                    keep.append(ci)
                    continue
                for j in range(2, len(c)):
                    if lit_value(c[j]) is not False:
                        c[1], c[j] = c[j], c[1]
                        watches.setdefault(c[1], []).append(ci)
                        break
                else:
                    keep.append(ci)
                    if not assign(c[0]):
                        conflict = True
            watches[false_lit] = keep
            if conflict:
                return False
        return True

    for u in units:
        if not assign(u):
            return None
    if not propagate(0):
        return None

    # decision stack entries: (trail length before decision, variable, tried_true)
    decisions: list[tuple[int, int, bool]] = []
    next_var = 1
    while True:
        while next_var <= n and value[next_var] is not None:
            next_var += 1
        if next_var > n:
            return value
        mark = len(trail)
        decisions.append((mark, next_var, False))
        assign(-next_var)
        ok = propagate(mark)
        while not ok:
            # backtrack to the most recent decision that still has the true branch open
            while decisions and decisions[-1][2]:
                mark, var, _ = decisions.pop()
                for lit in trail[mark:]:
                    value[abs(lit)] = None
                del trail[mark:]
            if not decisions:
                return None
            mark, var, _ = decisions.pop()
            for lit in trail[mark:]:
                value[abs(lit)] = None
            del trail[mark:]
            decisions.append((mark, var, True))
            assign(var)
            ok = propagate(mark)
            next_var = 1
        next_var = 1 if not decisions else min(next_var, decisions[-1][1])


def solve_named(cnf: Cnf, names: Optional[Iterable[str]] = None) -> Optional[dict[str, bool]]:
    values = solve(cnf)
    if values is None:
        return None
    wanted = names if names is not None else cnf.names[1:cnf.num_inputs + 1]
    return {v: bool(values[cnf.var(v)]) for v in wanted}


def sat(f: Formula) -> Optional[dict[str, bool]]:
    """A satisfying assignment over the variables of ``f``, or None."""
    return solve_named(to_cnf(f))


# --------------------------------------------------------------------------
# Guard text: ! ¬ (not), & ∧ (and), ^ ⊕ (xor), | ∨ (or); binding tightest first.

_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_.#]*)|(?P<op>[()!¬&∧|∨^⊕]))")


def parse_formula(text: str) -> Formula:
    tokens: list[str] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaError(f"unexpected character {text[pos:].strip()[:1]!r} at offset {pos} in {text!r}")
        tokens.append(m.group("id") or m.group("op"))
        pos = m.end()
    tokens = [{"¬": "!", "∧": "&", "∨": "|", "⊕": "^"}.get(t, t) for t in tokens]
    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else None

    def take(expected=None):
        nonlocal i
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise FormulaError(f"expected {expected or 'a token'} at token {i} in {text!r}")
        i += 1
        return tok

    def binary(sub, op, build):
        parts = [sub()]
        while peek() == op:
            take()
            parts.append(sub())
        return parts[0] if len(parts) == 1 else build(parts)

    def p_or():
        return binary(p_xor, "|", Or)

    def p_xor():
        def build(parts):
            acc = parts[0]
            for p in parts[1:]:
                acc = Xor(acc, p)
            return acc
        return binary(p_and, "^", build)

    def p_and():
        return binary(p_not, "&", And)

    def p_not():
        tok = peek()
        if tok == "!":
            take()
            return Not(p_not())
        if tok == "(":
            take()
            f = p_or()
            take(")")
            return f
        if tok is None or tok in ")&|^":
            raise FormulaError(f"expected an operand at token {i} in {text!r}")
        take()
        if tok == "true":
            return TRUE
        if tok == "false":
            return FALSE
        return Var(tok)

    f = p_or()
    if i != len(tokens):
        raise FormulaError(f"trailing input at token {i} in {text!r}")
    return f


_PREC = {Or: 1, Xor: 2, And: 3}


def format_formula(f: Formula, ascii_ops: bool = True) -> str:
    ops = {"not": "!", "and": " & ", "or": " | ", "xor": " ^ "} if ascii_ops else \
          {"not": "¬", "and": " ∧ ", "or": " ∨ ", "xor": " ⊕ "}

    def fmt(g: Formula, parent: int) -> str:
        if isinstance(g, Var):
            return g.name
        if isinstance(g, Const):
            return "true" if g.value else "false"
        if isinstance(g, Not):
            return ops["not"] + fmt(g.arg, 4)
        prec = _PREC[type(g)]
        if isinstance(g, Xor):
            s = fmt(g.left, prec) + ops["xor"] + fmt(g.right, prec + 1)
        else:
            sep = ops["and"] if isinstance(g, And) else ops["or"]
            if not g.args:
                return "true" if isinstance(g, And) else "false"
            s = sep.join(fmt(a, prec + 1) for a in g.args)
        return f"({s})" if prec <= parent else s

    return fmt(f, 0)
