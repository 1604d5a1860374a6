import json
import random

import pytest

from boolsys import verify
from boolsys.boolnet import BooleanSystem, ColouredMarking, LogicalType, TransitionSpec, UNARY, build_net
from boolsys.bruteforce import analyse_colours
from boolsys.checker import UsageError, analyse, check_deadlocks, check_high_liveness
from boolsys.epc import epc_to_system
from boolsys.io import load_fixture
from boolsys.petri import PetriNet
from boolsys.randnets import random_system

from conftest import closing_system

TABLE4 = """Loan request with loop
OK, no deadlock
Successor graph: 1 strong component(s):
Minimal - Maximal - Component 1 with 2 node(s):
A1 and not A2 , not A1 and A2 ,
ERROR, non high-live transition(s):
Boolean transition of type: CLOSING OR with arc-variables: A6, A7, A9
"""


def steered_and():
    """An opening XOR feeds a closing AND: one branch high, the other low."""
    net = PetriNet(
        ["x0", "y0", "x", "y", "z"],
        ["split", "tx", "ty", "join"],
        [("z", "split"), ("split", "x0"), ("split", "y0"), ("x0", "tx"), ("tx", "x"),
         ("y0", "ty"), ("ty", "y"), ("x", "join"), ("y", "join"), ("join", "z")],
    )
    specs = {
        "split": TransitionSpec(LogicalType("XOR", "opening"), sides=("x0", "y0")),
        "tx": TransitionSpec(UNARY),
        "ty": TransitionSpec(UNARY),
        "join": TransitionSpec(LogicalType("AND", "closing"), sides=("x", "y")),
    }
    bn = build_net(net, {p: p.upper() for p in net.places}, specs)
    return BooleanSystem(bn, ColouredMarking.from_colours({"z": True}))


def test_loan_request_report():
    r = verify(load_fixture("fig4-loan-request"))
    assert r.render_text() == TABLE4
    assert r.overall == "ill_behaved" and r.exit_code == 1
    assert r.deadlocks == []


def test_loan_request_findings():
    bs = load_fixture("fig4-loan-request")
    _, cp, g = analyse(bs)
    assert check_deadlocks(cp, g) == []
    (f,) = check_high_liveness(cp, g)
    assert (f.transition, f.type, f.arc_vars) == ("t5", "CLOSING OR", ["A6", "A7", "A9"])


def test_loan_request_corrected():
    r = verify(load_fixture("fig4-corrected"))
    assert r.well_behaved
    assert r.render_text().endswith("OK, high-live\n")


def test_fig13_findings():
    r = verify(load_fixture("fig13-verification-epc"))
    assert r.deadlocks == []
    assert [f.arc_vars for f in r.non_live_transitions()] == [["A10", "A11", "A12"], ["A12", "A13", "A14"]]
    assert all(f.type == "CLOSING OR" for f in r.non_live_transitions())
    assert len(r.components) == 1 and len(r.components[0]["base_markings"]) == 3


def test_fig13_corrected():
    assert verify(load_fixture("fig13-corrected")).well_behaved


def test_fig8_translation_is_well_behaved():
    model, spec, lows = load_fixture("fig8-closing-or")
    bs = epc_to_system(model, spec, lows).system
    for mode in ("optimized", "exhaustive"):
        assert verify(bs, mode).well_behaved


def test_steered_and_deadlock():
    bs = steered_and()
    r = verify(bs)
    assert r.overall == "ill_behaved"
    assert [f.transition for f in r.deadlock_transitions()] == ["join"]
    assert not r.liveness_checked
    assert "ERROR, deadlock transition(s):" in r.render_text()
    # brute force finds a reachable marking enabling join in the skeleton but with no binding
    assert analyse_colours(bs).deadlock_transitions == {"join"}


def test_liveness_refuses_deadlocked_systems():
    _, cp, g = analyse(steered_and())
    with pytest.raises(UsageError):
        check_high_liveness(cp, g, deadlocks=check_deadlocks(cp, g))
    with pytest.raises(UsageError):
        check_high_liveness(cp, g, mode="fast")


def test_skeleton_failure_and_invalid():
    bs = closing_system("AND", {"x": True, "y": True})
    # two tokens on the x-branch circuit make the skeleton unsafe
    unsafe = BooleanSystem(bs.bnet, ColouredMarking.from_colours({"x": True, "x0": True, "y": True}))
    r = verify(unsafe)
    assert r.overall == "skeleton_failure" and r.exit_code == 2
    assert r.skeleton["safe"] is False
    dead = BooleanSystem(bs.bnet, ColouredMarking.from_colours({"x": True}))
    assert verify(dead).skeleton["live"] is False
    with pytest.raises(UsageError):
        verify(bs, "quick")


def test_machine_report_roundtrips_through_json():
    r = verify(load_fixture("fig13-verification-epc"), "exhaustive")
    d = json.loads(json.dumps(r.to_dict()))
    assert d["schema"] == "boolsys-report/1"
    assert d["overall"] == "ill_behaved"
    assert {tuple(f["arc_vars"]) for f in d["non_high_live"]} == {("A10", "A11", "A12"), ("A12", "A13", "A14")}


def test_text_is_deterministic():
    a = verify(load_fixture("fig13-verification-epc")).render_text()
    b = verify(load_fixture("fig13-verification-epc")).render_text()
    assert a == b


def test_random_systems_against_bruteforce():
    rng = random.Random(5)
    for _ in range(60):
        bs = random_system(rng, places=rng.randint(3, 9))
        r = verify(bs, "exhaustive")
        a = analyse_colours(bs)
        assert {f.transition for f in r.deadlock_transitions()} == a.deadlock_transitions
        if r.liveness_checked:
            assert {f.transition for f in r.non_live_transitions()} == {t for t, _ in a.non_live_bindings}
            assert {f.transition for f in verify(bs).non_live_transitions()} == {t for t, _ in a.non_live_bindings}
        assert r.well_behaved == a.well_behaved
