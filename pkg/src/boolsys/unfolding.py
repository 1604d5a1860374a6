"""Finite complete prefixes of live and safe T-systems.

The unfolding of a T-system is a single causal net: the k-th occurrence of
a transition consumes, from each pre-place, the k-th token ever put there
(initial tokens first).  Construction runs in two phases.  Phase one is a
McMillan-style complete prefix with marking-repeat cutoffs.  Phase two
rebuilds the prefix by firing every transition exactly ``n`` times, where
``n`` is the largest occurrence count seen in phase one, so that the
maximal cut is again the initial marking.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Optional

from boolsys.petri import Marking, NetError, node_key, sorted_nodes
from boolsys.tsystem import StructuralError, TSystem, check_skeleton


class PrefixError(NetError):
    pass


@dataclass
class OccurrenceNet:
    """A causal net: conditions with at most one pre- and one post-event."""

    conditions: tuple[str, ...]
    events: tuple[str, ...]
    event_pre: dict[str, tuple[str, ...]]
    event_post: dict[str, tuple[str, ...]]
    cond_pre: dict[str, Optional[str]]
    cond_post: dict[str, Optional[str]]
    _local: dict = field(default_factory=dict, repr=False)

    @property
    def arcs(self) -> list[tuple[str, str]]:
        out = []
        for e in self.events:
            out += [(b, e) for b in self.event_pre[e]]
            out += [(e, b) for b in self.event_post[e]]
        return out

    @property
    def min_cut(self) -> tuple[str, ...]:
        return tuple(b for b in self.conditions if self.cond_pre[b] is None)

    @property
    def max_cut(self) -> tuple[str, ...]:
        return tuple(b for b in self.conditions if self.cond_post[b] is None)

    def local_configuration(self, e: str) -> frozenset[str]:
        """[e]: the event together with all its causal predecessors."""
        if e not in self._local:
            acc = {e}
            stack = [e]
            while stack:
                x = stack.pop()
                for b in self.event_pre[x]:
                    f = self.cond_pre[b]
                    if f is not None and f not in acc:
                        if f in self._local:
                            acc |= self._local[f]
                        else:
                            acc.add(f)
                            stack.append(f)
            self._local[e] = frozenset(acc)
        return self._local[e]

    def condition_past(self, b: str) -> frozenset[str]:
        e = self.cond_pre[b]
        return self.local_configuration(e) if e is not None else frozenset()

    def precedes(self, b1: str, b2: str) -> bool:
        """Strict causal order b1 < b2 between conditions."""
        e = self.cond_post[b1]
        return e is not None and e in self.condition_past(b2)


@dataclass
class Prefix:
    on: OccurrenceNet
    fold: dict[str, str]  # condition -> place, event -> transition
    n: int
    ts: TSystem
    cond_index: dict[str, int] = field(default_factory=dict)  # occurrence index of a condition's place
    cutoffs: frozenset[str] = frozenset()

    @property
    def min_cut(self):
        return self.on.min_cut

    @property
    def max_cut(self):
        return self.on.max_cut

    def events_of(self, t: str) -> list[str]:
        return [e for e in self.on.events if self.fold[e] == t]

    def occurrence_counts(self) -> dict[str, int]:
        counts = {t: 0 for t in self.ts.net.transitions}
        for e in self.on.events:
            counts[self.fold[e]] += 1
        return counts

    def fold_cut(self, cut: Iterable[str]) -> Marking:
        return Marking.from_places(self.fold[b] for b in cut)

    def summary(self) -> dict:
        return {
            "n": self.n,
            "events": len(self.on.events),
            "conditions": len(self.on.conditions),
            "min_cut": list(self.min_cut),
            "max_cut": list(self.max_cut),
            "fold_min_cut": [self.fold[b] for b in self.min_cut],
            "fold_max_cut": [self.fold[b] for b in self.max_cut],
        }

    def dump(self) -> dict:
        return {
            **self.summary(),
            "nodes": [{"id": x, "kind": "condition", "fold": self.fold[x]} for x in self.on.conditions]
                     + [{"id": x, "kind": "event", "fold": self.fold[x]} for x in self.on.events],
            "arcs": [list(a) for a in self.on.arcs],
        }


# --------------------------------------------------------------------------

def _require_live_safe(ts: TSystem):
    verdict = check_skeleton(ts)
    if not verdict.live:
        raise StructuralError(f"skeleton is not live: token-free circuit {verdict.unmarked_circuit}")
    if not verdict.safe:
        raise StructuralError(f"skeleton is not safe: place {verdict.unsafe_place} lies only on circuits "
                              f"with more than one token, e.g. {verdict.unsafe_circuit}")


def _occurrence_sources(ts: TSystem):
    """For occurrence k of t and pre-place p: which occurrence of pre(p) produced the token (None = initial)."""
    net, m0 = ts.net, ts.initial

    def source(p: str, k: int) -> Optional[tuple[str, int]]:
        if k < m0[p]:
            return None
        (u,) = net.pre(p)
        return (u, k - m0[p])

    return source


def _build(ts: TSystem, occurrences: Iterable[tuple[str, int]], cutoffs=frozenset()) -> Prefix:
    """Materialize the causal net spanned by a downward-closed set of occurrences (t, k)."""
    net, m0 = ts.net, ts.initial
    occs = set(occurrences)
    source = _occurrence_sources(ts)

    deps: dict[tuple[str, int], list[tuple[str, int]]] = {}
    for t, k in occs:
        ds = []
        for p in net.pre(t):
            s = source(p, k)
            if s is not None:
                if s not in occs:
                    raise PrefixError(f"occurrence set not downward closed: {t}#{k} needs {s[0]}#{s[1]}")
                ds.append(s)
        deps[(t, k)] = ds

    # topological numbering, ties broken on (fold target, creation index)
    indeg = {o: len(set(ds)) for o, ds in deps.items()}
    users: dict[tuple[str, int], set] = {o: set() for o in occs}
    for o, ds in deps.items():
        for d in set(ds):
            users[d].add(o)
    ready = [(node_key(t), k, t) for (t, k), d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order: list[tuple[str, int]] = []
    while ready:
        _, k, t = heapq.heappop(ready)
        order.append((t, k))
        for u in users[(t, k)]:
            indeg[u] -= 1
            if indeg[u] == 0:
                heapq.heappush(ready, (node_key(u[0]), u[1], u[0]))
    event_name = {o: f"e{i}" for i, o in enumerate(order)}

    # conditions: (place, index) pairs; index < m0(p) are initial tokens
    produced: dict[tuple[str, int], Optional[str]] = {}
    consumed: dict[tuple[str, int], Optional[str]] = {}
    for p in net.places:
        for j in range(m0[p]):
            produced[(p, j)] = None
    for t, k in order:
        e = event_name[(t, k)]
        for p in net.post(t):
            produced[(p, k + m0[p])] = e
        for p in net.pre(t):
            consumed[(p, k)] = e
    for key in produced:
        consumed.setdefault(key, None)

    # numbering: min cut, then inner conditions in event order, then max cut
    minimal = sorted((c for c in produced if produced[c] is None), key=lambda c: (node_key(c[0]), c[1]))
    maximal = sorted((c for c in produced if produced[c] is not None and consumed[c] is None),
                     key=lambda c: (node_key(c[0]), c[1]))
    inner = [c for c in produced if produced[c] is not None and consumed[c] is not None]
    ev_pos = {e: i for i, e in enumerate(event_name[o] for o in order)}
    inner.sort(key=lambda c: (ev_pos[produced[c]], node_key(c[0]), c[1]))
    cond_name = {c: f"c{i + 1}" for i, c in enumerate(minimal + inner + maximal)}

    conditions = tuple(cond_name[c] for c in minimal + inner + maximal)
    fold: dict[str, str] = {}
    cond_index: dict[str, int] = {}
    cond_pre: dict[str, Optional[str]] = {}
    cond_post: dict[str, Optional[str]] = {}
    for c, name in cond_name.items():
        fold[name] = c[0]
        cond_index[name] = c[1]
        cond_pre[name] = produced[c]
        cond_post[name] = consumed[c]
    event_pre: dict[str, tuple[str, ...]] = {}
    event_post: dict[str, tuple[str, ...]] = {}
    for t, k in order:
        e = event_name[(t, k)]
        fold[e] = t
        event_pre[e] = tuple(cond_name[(p, k)] for p in sorted_nodes(net.pre(t)))
        event_post[e] = tuple(cond_name[(p, k + m0[p])] for p in sorted_nodes(net.post(t)))
    on = OccurrenceNet(conditions, tuple(event_name[o] for o in order), event_pre, event_post, cond_pre, cond_post)
    counts: dict[str, int] = {}
    for t, _ in occs:
        counts[t] = counts.get(t, 0) + 1
    n = max(counts.values(), default=0)
    return Prefix(on, fold, n, ts, cond_index, frozenset(event_name[o] for o in cutoffs))


def mcmillan_prefix(ts: TSystem) -> Prefix:
    """Phase one: complete prefix with marking-repeat cutoffs.

    Possible extensions are added in order of local-configuration size,
    then sorted Parikh vector.  An event is a cutoff when the marking of its
    local configuration was already produced by a smaller configuration
    (the empty configuration yields the initial marking).  Cutoffs are kept
    but never extended.
    """
    _require_live_safe(ts)
    net, m0 = ts.net, ts.initial
    source = _occurrence_sources(ts)
    tindex = {t: i for i, t in enumerate(net.transitions)}

    local: dict[tuple[str, int], frozenset] = {}
    added: set[tuple[str, int]] = set()
    cutoffs: set[tuple[str, int]] = set()
    seen_markings = {m0}

    def candidate(t: str, k: int):
        """The local configuration of (t, k), if all its causes are added non-cutoff events."""
        cfg = {(t, k)}
        for p in net.pre(t):
            s = source(p, k)
            if s is None:
                continue
            if s not in added or s in cutoffs:
                return None
            cfg |= local[s]
        return frozenset(cfg)

    def key(cfg):
        parikh = [0] * len(tindex)
        for t, _ in cfg:
            parikh[tindex[t]] += 1
        return (len(cfg), tuple(parikh))

    def marking_of(cfg) -> Marking:
        tokens = m0.as_dict()
        for t, _ in cfg:
            for p in net.pre(t):
                tokens[p] = tokens.get(p, 0) - 1
            for p in net.post(t):
                tokens[p] = tokens.get(p, 0) + 1
        return Marking(tokens)

    heap: list = []
    queued: set = set()
    counter = {t: 0 for t in net.transitions}

    def push_next(t: str):
        k = counter[t]
        if (t, k) in queued:
            return
        cfg = candidate(t, k)
        if cfg is not None:
            queued.add((t, k))
            heapq.heappush(heap, (key(cfg), node_key(t), k, t, cfg))

    for t in net.transitions:
        push_next(t)
    while heap:
        _, _, k, t, cfg = heapq.heappop(heap)
        o = (t, k)
        added.add(o)
        local[o] = cfg
        counter[t] = k + 1
        m = marking_of(cfg)
        if m in seen_markings:
            cutoffs.add(o)
        else:
            seen_markings.add(m)
            for p in net.post(t):
                (u,) = net.post(p)
                push_next(u)
        push_next(t)
    return _build(ts, added, cutoffs)


def uniform_schedule(ts: TSystem, n: int) -> list[str]:
    """Fire every transition exactly ``n`` times; always pick the enabled one with smallest (count, name)."""
    net = ts.net
    tokens = ts.initial.as_dict()
    count = {t: 0 for t in net.transitions}
    seq: list[str] = []
    total = n * len(net.transitions)
    while len(seq) < total:
        options = [t for t in net.transitions if count[t] < n and all(tokens.get(p, 0) > 0 for p in net.pre(t))]
        if not options:
            raise StructuralError(f"cannot fire every transition {n} times; stuck after {seq}")
        t = min(options, key=lambda x: (count[x], node_key(x)))
        for p in net.pre(t):
            tokens[p] -= 1
        for p in net.post(t):
            tokens[p] = tokens.get(p, 0) + 1
        count[t] += 1
        seq.append(t)
    return seq


def unfold_complete(ts: TSystem) -> Prefix:
    """Complete prefix with uniform occurrence count n and mark(max cut) = mark(min cut)."""
    phase1 = mcmillan_prefix(ts)
    n = max(phase1.n, 1)
    seq = uniform_schedule(ts, n)
    seen: dict[str, int] = {}
    occs = []
    for t in seq:
        occs.append((t, seen.get(t, 0)))
        seen[t] = seen.get(t, 0) + 1
    pfx = _build(ts, occs)
    pfx.n = n
    return pfx


# --------------------------------------------------------------------------

def is_coset(on: OccurrenceNet, conditions: Iterable[str]) -> bool:
    return _ordered_pair(on, list(conditions)) is None


def _ordered_pair(on: OccurrenceNet, conds: list[str]) -> Optional[tuple[str, str]]:
    for b in conds:
        if b not in on.cond_pre:
            raise PrefixError(f"unknown condition {b!r}")
    if len(set(conds)) != len(conds):
        dup = next(b for b in conds if conds.count(b) > 1)
        return (dup, dup)
    for i, b1 in enumerate(conds):
        for b2 in conds[i + 1:]:
            if on.precedes(b1, b2):
                return (b1, b2)
            if on.precedes(b2, b1):
                return (b2, b1)
    return None


def past(on: OccurrenceNet, coset: Iterable[str]) -> frozenset[str]:
    """Events causally preceding some member of the co-set."""
    coset = list(coset)
    bad = _ordered_pair(on, coset)
    if bad:
        raise PrefixError(f"not a co-set: {bad[0]} precedes {bad[1]}")
    out: set[str] = set()
    for b in coset:
        out |= on.condition_past(b)
    return frozenset(out)


def cut_marking(pfx: Prefix, cut: Iterable[str]) -> Marking:
    cut = list(cut)
    bad = _ordered_pair(pfx.on, cut)
    if bad:
        raise PrefixError(f"not a co-set: {bad[0]} precedes {bad[1]}")
    members = set(cut)
    for b in pfx.on.conditions:
        if b in members:
            continue
        if not any(pfx.on.precedes(b, c) or pfx.on.precedes(c, b) for c in cut):
            raise PrefixError(f"co-set is not maximal: {b} is concurrent to all members")
    return pfx.fold_cut(cut)


def cuts(on: OccurrenceNet) -> set[frozenset[str]]:
    """All cuts of a causal net, found by firing events from the minimal cut."""
    start = frozenset(on.min_cut)
    seen = {start}
    stack = [start]
    while stack:
        cut = stack.pop()
        for e in on.events:
            pre = on.event_pre[e]
            if all(b in cut for b in pre):
                nxt = (cut - set(pre)) | set(on.event_post[e])
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return seen


def topological_events(on: OccurrenceNet) -> tuple[str, ...]:
    return on.events


__all__ = [
    "OccurrenceNet", "Prefix", "PrefixError", "cut_marking", "cuts", "is_coset", "mcmillan_prefix", "past",
    "unfold_complete", "uniform_schedule",
]
