import pytest
from hypothesis import given, strategies as st

from boolsys.io import load_fixture
from boolsys.petri import (
    Marking, NetError, PetriNet, enabled, fire, is_strongly_connected, is_tnet, node_key, postset, preset,
    reachable_markings, sorted_nodes,
)
from boolsys.tsystem import parikh

from conftest import cycle_net


def test_preset_single_arc():
    net = PetriNet(["p1", "p2"], ["t1"], [("p1", "t1"), ("t1", "p2")])
    assert preset(net, "t1") == {"p1"}
    assert postset(net, "t1") == {"p2"}


def test_preset_of_source_transition_is_empty():
    net = PetriNet(["p"], ["t"], [("t", "p")])
    assert preset(net, "t") == frozenset()


def test_fig2_join_consumes_both_initial_tokens():
    ts = load_fixture("fig2-tsystem")
    marked = ts.initial.support()
    joins = [t for t in ts.net.transitions if preset(ts.net, t) == marked]
    assert len(joins) == 1
    assert len(preset(ts.net, joins[0])) == 2


def test_fire_self_loop_keeps_marking():
    net = PetriNet(["p"], ["t"], [("p", "t"), ("t", "p")])
    assert fire(net, Marking({"p": 1}), "t") == Marking({"p": 1})


def test_fire_disabled_raises():
    net = cycle_net(2)
    with pytest.raises(NetError, match="not enabled"):
        fire(net, Marking({"p1": 1}), "t0")


def test_fig2_fire_each_transition_once_reproduces_marking():
    ts = load_fixture("fig2-tsystem")
    m = ts.initial
    pending = list(ts.net.transitions)
    seq = []
    while pending:
        t = next(t for t in pending if enabled(ts.net, m, t))
        m = fire(ts.net, m, t)
        pending.remove(t)
        seq.append(t)
    assert m == ts.initial
    assert set(parikh(seq).values()) == {1}


def test_strong_connectivity():
    assert is_strongly_connected(PetriNet(["p"], ["t"], [("p", "t"), ("t", "p")]))
    assert not is_strongly_connected(PetriNet(["p", "q"], ["t"], [("p", "t"), ("t", "q")]))
    assert is_strongly_connected(load_fixture("fig4-loan-request").net)


def test_is_tnet():
    assert is_tnet(cycle_net(3))
    branched = PetriNet(["p", "q"], ["t", "u"], [("p", "t"), ("p", "u"), ("t", "q"), ("u", "q"), ("q", "t")],
                        require_connected=False)
    assert not is_tnet(branched)
    assert is_tnet(load_fixture("fig4-loan-request").net)


def test_net_rejects_bad_structure():
    with pytest.raises(NetError):
        PetriNet(["x"], ["x"], [])
    with pytest.raises(NetError):
        PetriNet(["p"], ["t"], [("p", "nowhere")])
    with pytest.raises(NetError):
        PetriNet(["p", "q"], ["t", "u"], [("p", "t"), ("q", "u")])


def test_natural_order():
    assert sorted_nodes(["A10", "A2", "A1", "B"]) == ["A1", "A2", "A10", "B"]
    assert node_key("p2") < node_key("p10")


def test_marking_support_and_equality():
    m = Marking({"a": 1, "b": 0})
    assert m.support() == {"a"}
    assert m == Marking({"a": 1})
    assert hash(m) == hash(Marking({"a": 1}))


@given(st.integers(min_value=2, max_value=7), st.integers(min_value=1, max_value=3))
def test_cycle_reachable_count(n, k):
    # k tokens on an n-cycle: every distribution of the tokens is reachable
    net = cycle_net(n)
    k = min(k, n)
    m0 = Marking({f"p{i}": 1 for i in range(k)})
    graph = reachable_markings(net, m0)
    assert all(m.total() == k for m in graph)
    assert len(graph) >= n
