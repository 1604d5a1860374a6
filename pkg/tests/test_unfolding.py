import networkx as nx
import pytest

from boolsys.bruteforce import skeleton_reachable
from boolsys.io import load_fixture
from boolsys.petri import Marking
from boolsys.tsystem import StructuralError, TSystem
from boolsys.unfolding import (
    PrefixError, cut_marking, cuts, is_coset, mcmillan_prefix, past, unfold_complete,
)

from conftest import cycle_net, one_token_loop


def test_one_transition_cycle():
    pfx = unfold_complete(one_token_loop())
    assert pfx.n == 1
    assert len(pfx.on.events) == 1
    assert pfx.fold_cut(pfx.min_cut) == pfx.fold_cut(pfx.max_cut) == Marking({"p": 1})


def test_fig2_cuts():
    ts = load_fixture("fig2-tsystem")
    pfx = unfold_complete(ts)
    assert pfx.min_cut == ("c1", "c2")
    assert pfx.max_cut == ("c13", "c14")
    assert pfx.fold_cut(pfx.min_cut) == ts.initial == pfx.fold_cut(pfx.max_cut)
    assert pfx.n == 1 and len(pfx.on.events) == 8


def test_fig7_uniform_count_two():
    ts = load_fixture("fig7-tsystem")
    pfx = unfold_complete(ts)
    assert pfx.n == 2
    assert set(pfx.occurrence_counts().values()) == {2}


def test_fig7_truncated_prefix():
    ts = load_fixture("fig7-tsystem")
    on1 = mcmillan_prefix(ts)
    assert on1.fold_cut(on1.max_cut) == Marking({"p1": 1, "p2": 1})
    assert on1.fold_cut(on1.min_cut) == Marking({"p0": 1, "p2": 1})


def test_cut_marking_min_and_max():
    pfx = unfold_complete(load_fixture("fig2-tsystem"))
    init = pfx.ts.initial
    assert cut_marking(pfx, pfx.min_cut) == init
    assert cut_marking(pfx, pfx.max_cut) == init
    with pytest.raises(PrefixError):
        cut_marking(pfx, pfx.min_cut[:1])


def test_past():
    pfx = unfold_complete(load_fixture("fig2-tsystem"))
    on = pfx.on
    assert past(on, on.min_cut) == frozenset()
    assert past(on, on.max_cut) == frozenset(on.events)
    with pytest.raises(PrefixError):
        past(on, [on.min_cut[0], on.max_cut[0]])


def test_past_of_mid_coset_by_search():
    # every cut lists its past; the events fired to reach it are exactly those
    pfx = unfold_complete(load_fixture("fig2-tsystem"))
    on = pfx.on
    start = frozenset(on.min_cut)
    stack = [(start, frozenset())]
    seen = set()
    while stack:
        cut, fired = stack.pop()
        if cut in seen:
            continue
        seen.add(cut)
        assert past(on, cut) == fired
        for e in on.events:
            if set(on.event_pre[e]) <= cut:
                stack.append(((cut - set(on.event_pre[e])) | set(on.event_post[e]), fired | {e}))
    assert len(seen) > 3


def test_is_coset():
    pfx = unfold_complete(load_fixture("fig2-tsystem"))
    on = pfx.on
    b = on.min_cut[0]
    assert is_coset(on, [b])
    e = on.cond_post[b]
    assert not is_coset(on, [b, on.event_post[e][0]])
    assert is_coset(on, on.min_cut)


def test_prefix_structure_invariants(random_tsystems):
    for ts in random_tsystems[:60]:
        pfx = unfold_complete(ts)
        on = pfx.on
        g = nx.DiGraph(on.arcs)
        assert nx.is_directed_acyclic_graph(g)
        assert all(len([e for e in on.events if b in on.event_post[e]]) <= 1 for b in on.conditions)
        assert set(pfx.occurrence_counts().values()) == {pfx.n}
        assert pfx.fold_cut(pfx.min_cut) == ts.initial == pfx.fold_cut(pfx.max_cut)
        # topological event order is downward closed
        for i, e in enumerate(on.events):
            assert on.local_configuration(e) <= set(on.events[:i + 1])


def test_prefix_completeness(random_tsystems):
    for ts in random_tsystems:
        pfx = unfold_complete(ts)
        folded = {pfx.fold_cut(c) for c in cuts(pfx.on)}
        assert skeleton_reachable(ts) <= folded


def test_unfold_rejects_non_live():
    with pytest.raises(StructuralError, match="token-free circuit"):
        unfold_complete(TSystem(cycle_net(2), Marking({})))


def test_dump_has_all_nodes():
    pfx = unfold_complete(load_fixture("fig7-tsystem"))
    d = pfx.dump()
    assert len(d["nodes"]) == len(pfx.on.events) + len(pfx.on.conditions)
    assert len(d["arcs"]) == len(pfx.on.arcs)
