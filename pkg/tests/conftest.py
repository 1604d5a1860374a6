import sys
import random

import pytest

from boolsys.boolnet import BooleanSystem, ColouredMarking, LogicalType, TransitionSpec, UNARY, build_net
from boolsys.petri import Marking, PetriNet
from boolsys.randnets import random_system, random_tsystem
from boolsys.tsystem import TSystem

CORPUS_SEED = 20240607


def cycle_net(n=2):
    """p0 -> t0 -> p1 -> t1 -> ... -> p0"""
    places = [f"p{i}" for i in range(n)]
    trans = [f"t{i}" for i in range(n)]
    arcs = []
    for i in range(n):
        arcs.append((places[i], trans[i]))
        arcs.append((trans[i], places[(i + 1) % n]))
    return PetriNet(places, trans, arcs)


def unary_cycle(n=2, colours=None):
    net = cycle_net(n)
    bn = build_net(net, {p: p.upper() for p in net.places}, {t: TransitionSpec(UNARY) for t in net.transitions})
    return BooleanSystem(bn, ColouredMarking.from_colours(colours or {"p0": True}))


def closing_system(kind, colours):
    """Diamond: an opening AND feeds x and y, a closing ``kind`` joins them into z, which loops back."""
    net = PetriNet(
        ["x0", "y0", "x", "y", "z"],
        ["split", "tx", "ty", "join"],
        [("z", "split"), ("split", "x0"), ("split", "y0"), ("x0", "tx"), ("tx", "x"),
         ("y0", "ty"), ("ty", "y"), ("x", "join"), ("y", "join"), ("join", "z")],
    )
    specs = {
        "split": TransitionSpec(LogicalType("AND", "opening"), sides=("x0", "y0")),
        "tx": TransitionSpec(UNARY),
        "ty": TransitionSpec(UNARY),
        "join": TransitionSpec(LogicalType(kind, "closing"), sides=("x", "y")),
    }
    bn = build_net(net, {p: p.upper() for p in net.places}, specs)
    return BooleanSystem(bn, ColouredMarking.from_colours(colours))


@pytest.fixture(scope="session")
def random_corpus():
    """220 random safe strongly connected Boolean systems, some with a non-live skeleton."""
    rng = random.Random(CORPUS_SEED)
    out = []
    while len(out) < 220:
        places = rng.randint(3, 10)
        # small nets with a token cannot leave a circuit empty
        live = places < 5 or rng.random() < 0.85
        out.append(random_system(rng, places=places, live=live))
    return out


@pytest.fixture(scope="session")
def random_tsystems():
    rng = random.Random(CORPUS_SEED + 1)
    return [random_tsystem(rng, places=rng.randint(2, 10)) for _ in range(110)]


def one_token_loop():
    return TSystem(PetriNet(["p"], ["t"], [("p", "t"), ("t", "p")]), Marking({"p": 1}))


# standard binding table: rows are (X, Y, Z) with X, Y on the two-arc side
TABLE1 = {
    "AND": {(1, 1, 1), (0, 0, 0)},
    "XOR": {(1, 0, 1), (0, 1, 1), (0, 0, 0)},
    "AND_XOR": {(1, 1, 1), (1, 0, 1), (0, 0, 0)},
    "XOR_AND": {(1, 1, 1), (0, 1, 1), (0, 0, 0)},
    "OR": {(1, 0, 1), (0, 1, 1), (1, 1, 1), (0, 0, 0)},
}


def binary_transition(kind, direction):
    """A lone binary transition t with sides x, y and single side z, embedded in a cycle."""
    if direction == "closing":
        net = PetriNet(["x", "y", "z"], ["t", "u"],
                       [("x", "t"), ("y", "t"), ("t", "z"), ("z", "u"), ("u", "x"), ("u", "y")])
        specs = {"t": TransitionSpec(LogicalType(kind, "closing"), sides=("x", "y")),
                 "u": TransitionSpec(LogicalType("AND", "opening"), sides=("x", "y"))}
    else:
        net = PetriNet(["x", "y", "z"], ["t", "u"],
                       [("z", "t"), ("t", "x"), ("t", "y"), ("x", "u"), ("y", "u"), ("u", "z")])
        specs = {"t": TransitionSpec(LogicalType(kind, "opening"), sides=("x", "y")),
                 "u": TransitionSpec(LogicalType("AND", "closing"), sides=("x", "y"))}
    return build_net(net, {"x": "X", "y": "Y", "z": "Z"}, specs)


_SETUP_ERRORS = {}


def pytest_runtest_logreport(report):
    if report.when == "setup" and report.failed and "test_acceptance" in report.nodeid:
        msg = str(report.longrepr.reprcrash.message) if hasattr(report.longrepr, "reprcrash") else "error"
        _SETUP_ERRORS[report.nodeid.split("::")[-1]] = msg.splitlines()[0]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None:
        return
    lines = mod.summary_lines(_SETUP_ERRORS)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
