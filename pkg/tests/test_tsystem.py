import networkx as nx
from hypothesis import given, settings, strategies as st

from boolsys.bruteforce import skeleton_live, skeleton_safe
from boolsys.io import load_fixture
from boolsys.petri import Marking, PetriNet, enabled, fire
from boolsys.tsystem import TSystem, check_skeleton, min_token_circuit, parikh, token_free_circuit

from conftest import cycle_net, one_token_loop


def test_one_token_cycle_is_live_and_safe():
    r = check_skeleton(one_token_loop())
    assert r.live and r.safe and r.ok


def test_token_free_cycle_witness():
    ts = TSystem(cycle_net(3), Marking({}))
    r = check_skeleton(ts)
    assert not r.live
    assert set(r.unmarked_circuit.places()) == {"p0", "p1", "p2"}
    assert r.unmarked_circuit.token_count == 0


def test_fig4_skeleton_live_and_safe():
    ts = load_fixture("fig2-tsystem")
    assert ts.initial.total() == 2
    assert check_skeleton(ts).ok


def test_min_token_circuit_simple():
    c = min_token_circuit(one_token_loop(), "p")
    assert c.nodes == ("p", "t")
    assert c.token_count == 1
    assert min_token_circuit(TSystem(cycle_net(2), Marking({})), "p0").token_count == 0


def _two_circuits():
    # circuit A: p -> t -> q -> u -> p (1 token on p)
    # circuit B: p -> t -> r -> v -> s -> u -> p (tokens on p and s)
    net = PetriNet(
        ["p", "q", "r", "s"], ["t", "u", "v"],
        [("p", "t"), ("t", "q"), ("q", "u"), ("u", "p"), ("t", "r"), ("r", "v"), ("v", "s"), ("s", "u")],
    )
    return TSystem(net, Marking({"p": 1, "s": 1}))


def _all_circuit_weights(ts, p):
    g = ts.net.graph()
    out = []
    for cyc in nx.simple_cycles(g):
        if p in cyc:
            out.append(sum(ts.initial[x] for x in cyc if ts.net.is_place(x)))
    return out


def test_min_token_circuit_prefers_lighter_circuit():
    ts = _two_circuits()
    c = min_token_circuit(ts, "p")
    assert c.token_count == 1 == min(_all_circuit_weights(ts, "p"))
    assert "q" in c.places()


def test_min_token_circuit_matches_enumeration(random_tsystems):
    for ts in random_tsystems[:40]:
        for p in ts.net.places:
            assert min_token_circuit(ts, p).token_count == min(_all_circuit_weights(ts, p))


def test_check_skeleton_matches_bruteforce(random_tsystems):
    for ts in random_tsystems:
        r = check_skeleton(ts)
        assert r.live == skeleton_live(ts)
        assert r.safe == skeleton_safe(ts)


def test_unsafe_system_detected():
    ts = TSystem(cycle_net(3), Marking({"p0": 1, "p1": 1}))
    r = check_skeleton(ts)
    assert r.live and not r.safe
    assert r.unsafe_circuit.token_count == 2
    assert not skeleton_safe(ts)


def test_parikh():
    assert parikh([]) == {}
    assert parikh([], ["t1"]) == {"t1": 0}
    assert parikh(["t1", "t2", "t1"]) == {"t1": 2, "t2": 1}


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_reproducing_sequences_are_uniform(seed):
    # random walk on the fig2 skeleton; every return to the initial marking has a constant Parikh vector
    import random
    rng = random.Random(seed)
    ts = load_fixture("fig2-tsystem")
    m, seq = ts.initial, []
    for _ in range(40):
        choices = [t for t in ts.net.transitions if enabled(ts.net, m, t)]
        t = rng.choice(choices)
        m = fire(ts.net, m, t)
        seq.append(t)
        if m == ts.initial:
            counts = parikh(seq, ts.net.transitions)
            assert len(set(counts.values())) == 1


def test_token_free_circuit_none_when_live():
    assert token_free_circuit(load_fixture("fig7-tsystem")) is None
