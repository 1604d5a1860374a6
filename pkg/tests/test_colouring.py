import itertools
import random

import pytest

from boolsys.boolnet import bindings_of, skeleton_of
from boolsys.checker import analyse
from boolsys.colouring import (
    check, colour_prefix, dead_formula, deadlock_patterns, enabl_formula, initial_base, mark_formula,
    reach_formula, successors,
)
from boolsys.io import load_fixture
from boolsys.logic import FALSE, TRUE, models, rename
from boolsys.petri import NetError
from boolsys.randnets import random_system
from boolsys.unfolding import unfold_complete

from conftest import binary_transition, closing_system, unary_cycle


def coloured_runs(cp, base):
    """Coloured token game on the prefix itself: every reachable (cut, colours) from ``base``."""
    start = frozenset(base)
    seen = {start}
    stack = [start]
    while stack:
        state = stack.pop()
        colours = dict(state)
        for e in cp.on.events:
            pre, post = cp.on.event_pre[e], cp.on.event_post[e]
            if not all(b in colours for b in pre):
                continue
            local = [cp.cond_vars[b] for b in pre + post]
            for m in models(cp.guards[e], local):
                if any(m[cp.cond_vars[b]] != colours[b] for b in pre):
                    continue
                nxt = {b: c for b, c in colours.items() if b not in pre}
                nxt.update({b: m[cp.cond_vars[b]] for b in post})
                fs = frozenset(nxt.items())
                if fs not in seen:
                    seen.add(fs)
                    stack.append(fs)
    return seen


def test_unary_event_guards():
    bs = unary_cycle(2)
    pfx = unfold_complete(skeleton_of(bs))
    cp = colour_prefix(pfx, bs)
    for e in cp.on.events:
        (b_in,), (b_out,) = cp.on.event_pre[e], cp.on.event_post[e]
        vi, vo = cp.cond_vars[b_in], cp.cond_vars[b_out]
        assert models(cp.guards[e], [vi, vo]) == [{vi: False, vo: False}, {vi: True, vo: True}]


def test_fig6_colouring_of_fig2_prefix():
    bs = load_fixture("fig4-loan-request")
    pfx, cp, _ = analyse(bs)
    assert len(cp.on.conditions) == 14 and len(cp.on.events) == 8
    # fold = skeleton . cov on every node
    for x in cp.on.conditions + cp.on.events:
        assert cp.cov[x] == pfx.fold[x]
    assert len(set(cp.cond_vars.values())) == len(cp.cond_vars)
    assert initial_base(cp) == (("c1", True), ("c2", False))


def test_events_of_same_transition_share_guard_shape():
    rng = random.Random(3)
    while True:
        sys_ = random_system(rng, places=8)
        pfx, cp, _ = analyse(sys_)
        if pfx.n == 2:
            break
    for t in sys_.bnet.transitions:
        es = cp.events_of(t)
        assert len(es) == 2
        g0 = rename(sys_.bnet.guards[t], cp.event_vars(es[0]))
        g1 = rename(sys_.bnet.guards[t], cp.event_vars(es[1]))
        assert g0 == cp.guards[es[0]] and g1 == cp.guards[es[1]]
        assert not (cp.guards[es[0]].variables() & cp.guards[es[1]].variables())


def test_mark_formula():
    bs = load_fixture("fig4-loan-request")
    _, cp, g = analyse(bs)
    assert mark_formula(cp, {}) == TRUE
    base = g.vertices[0]
    assert cp.base_label(base) == "A1 and not A2"
    assert check(mark_formula(cp, base)) == {"A1#0": True, "A2#0": False}
    assert "not A1 and A2" in [cp.base_label(b) for b in successors(cp, base)]


def test_reach_zero_steps():
    _, cp, g = analyse(load_fixture("fig4-loan-request"))
    base = g.initial
    assert check(reach_formula(cp, base, dict(base))) is not None


def test_loan_request_closing_xor_never_high_high():
    bs = load_fixture("fig4-loan-request")
    _, cp, g = analyse(bs)
    for t in ("t1", "t8"):
        for e in cp.events_of(t):
            target = {c: True for c in cp.on.event_pre[e]}
            for base in g.vertices:
                assert check(reach_formula(cp, base, target)) is None


def test_reach_matches_coloured_token_game():
    rng = random.Random(11)
    checked = 0
    while checked < 25:
        bs = random_system(rng, places=6)
        try:
            pfx, cp, g = analyse(bs)
        except NetError:
            continue
        checked += 1
        for base in g.vertices:
            states = coloured_runs(cp, base)
            for e in cp.on.events:
                pre = cp.on.event_pre[e]
                for bits in itertools.product((False, True), repeat=len(pre)):
                    target = dict(zip(pre, bits))
                    expected = any(all(dict(s).get(b) == c for b, c in target.items()) for s in states)
                    assert (check(reach_formula(cp, base, target)) is not None) == expected


def test_successors_match_coloured_token_game():
    rng = random.Random(12)
    for _ in range(20):
        bs = random_system(rng, places=rng.randint(4, 8))
        pfx, cp, g = analyse(bs)
        for base in g.vertices:
            ends = set()
            for s in coloured_runs(cp, base):
                d = dict(s)
                if set(d) == set(cp.max_cut):
                    by_place = {cp.cov[b]: c for b, c in d.items()}
                    ends.add(cp.base_from_colours({b: by_place[cp.cov[b]] for b in cp.min_cut}))
            assert set(successors(cp, base)) == ends


def test_enabl_opening_from_min_cut():
    bs = closing_system("AND", {"z": True})
    _, cp, g = analyse(bs)
    (e,) = cp.events_of("split")
    high = next(b for b in bindings_of(bs.bnet, "split") if b.is_high)
    assert check(enabl_formula(cp, g.initial, e, high)) is not None


def test_loan_request_or_has_one_dead_mode():
    # the opening AND_XOR upstream never produces (A6 low, A7 high); that OR mode is never enabled
    bs = load_fixture("fig4-loan-request")
    _, cp, g = analyse(bs)
    (e,) = cp.events_of("t5")
    dead_modes = []
    for b in bindings_of(bs.bnet, "t5"):
        if not b.is_high:
            continue
        if all(check(enabl_formula(cp, base, e, b)) is None for base in g.vertices):
            dead_modes.append((b["A6"], b["A7"]))
    assert dead_modes == [(False, True)]


def test_corrected_distinguished_enablings():
    bs = load_fixture("fig4-corrected")
    _, cp, g = analyse(bs)
    (e,) = cp.events_of("t5")
    comp = g.maximal_components()[0]
    for b in bindings_of(bs.bnet, "t5"):
        if b.is_high:
            assert any(check(enabl_formula(cp, base, e, b)) is not None for base in comp)


def test_deadlock_patterns_table3():
    expect = {
        "AND": [{"X": False, "Y": True}, {"X": True, "Y": False}],
        "XOR": [{"X": True, "Y": True}],
        "AND_XOR": [{"X": False, "Y": True}],
        "XOR_AND": [{"X": True, "Y": False}],
        "OR": [],
    }
    for kind, pats in expect.items():
        assert deadlock_patterns(binary_transition(kind, "closing"), "t") == pats


def test_dead_formula_shapes():
    bs = closing_system("OR", {"z": True})
    _, cp, g = analyse(bs)
    (e,) = cp.events_of("join")
    assert dead_formula(cp, g.initial, e) == FALSE
    (s,) = cp.events_of("split")
    assert dead_formula(cp, g.initial, s) == FALSE
    (u,) = cp.events_of("tx")
    with pytest.raises(NetError):
        dead_formula(cp, g.initial, u)
    xor = closing_system("XOR", {"z": True})
    _, cp, g = analyse(xor)
    (e,) = cp.events_of("join")
    model = check(dead_formula(cp, g.initial, e))
    pre = cp.on.event_pre[e]
    assert model is not None and all(model[cp.cond_vars[c]] for c in pre)


def test_successor_graph_single_condition():
    bs = unary_cycle(3)
    _, cp, g = analyse(bs)
    assert len(cp.min_cut) == 1
    assert g.vertices == [(("c1", True),)]


def test_successor_graph_fixtures():
    _, _, g = analyse(load_fixture("fig4-loan-request"))
    assert len(g.components) == 1 and len(g.vertices) == 2
    assert g.minimal == g.maximal == {0}
    _, _, g = analyse(load_fixture("fig13-verification-epc"))
    assert len(g.components) == 1 and len(g.vertices) == 3
