import json

import pytest
from hypothesis import given, settings, strategies as st

from boolsys.io import (
    FIXTURES, ModelFileError, dumps, epc_from_doc, epc_to_doc, load, parse_document, system_from_doc,
    system_to_doc, tsystem_from_doc, tsystem_to_doc,
)
from boolsys.randnets import random_system


@pytest.mark.parametrize("name", FIXTURES)
def test_fixtures_load(name):
    kind, obj = load(name)
    assert kind in ("boolean-system", "t-system", "epc")


def _canon(doc):
    return json.loads(dumps(doc))


@pytest.mark.parametrize("name", ["fig4-loan-request", "fig13-verification-epc", "fig4-corrected"])
def test_system_roundtrip(name):
    _, bs = load(name)
    doc = system_to_doc(bs)
    again = system_to_doc(system_from_doc(doc))
    assert _canon(doc) == _canon(again)


def test_tsystem_roundtrip():
    _, ts = load("fig7-tsystem")
    doc = tsystem_to_doc(ts)
    assert tsystem_to_doc(tsystem_from_doc(doc)) == doc


def test_epc_roundtrip():
    _, (m, spec, lows) = load("epc-fig11")
    doc = epc_to_doc(m, spec, lows)
    m2, spec2, lows2 = epc_from_doc(doc)
    assert epc_to_doc(m2, spec2, lows2) == doc


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_random_system_roundtrip(seed):
    import random
    bs = random_system(random.Random(seed), places=7)
    doc = system_to_doc(bs)
    assert _canon(system_to_doc(system_from_doc(doc))) == _canon(doc)


def test_guard_text_transition():
    doc = {
        "kind": "boolean-system",
        "places": [{"id": "a", "initial": "high"}, {"id": "b"}],
        "transitions": [{"id": "t", "guard": "(a & b) | !(a | b)"}, {"id": "u", "guard": "(b ∧ a) ∨ ¬(a ∨ b)"}],
        "arcs": [["a", "t"], ["t", "b"], ["b", "u"], ["u", "a"]],
    }
    bs = system_from_doc(doc)
    assert len(bs.bnet.guards) == 2
    assert system_from_doc(system_to_doc(bs)).bnet.guards["t"] is not None


def test_parse_errors_carry_location():
    with pytest.raises(ModelFileError, match=r"x\.json:2:"):
        parse_document('{\n  "kind": ,\n}', "x.json")
    with pytest.raises(ModelFileError, match="kind"):
        parse_document('{"kind": "petri"}')


def test_bad_documents():
    base = {"kind": "boolean-system", "places": [{"id": "a", "initial": "high"}],
            "transitions": [{"id": "t"}], "arcs": [["a", "t"], ["t", "a"]]}
    with pytest.raises(ModelFileError, match=r"transitions\[0\]"):
        system_from_doc(base)
    bad = dict(base, transitions=[{"id": "t", "guard": "a &"}])
    with pytest.raises(ModelFileError, match="guard"):
        system_from_doc(bad)
    bad = dict(base, places=[{"id": "a", "initial": "purple"}])
    with pytest.raises(ModelFileError, match="initial"):
        system_from_doc(bad)


def test_missing_file():
    with pytest.raises(ModelFileError, match="no such file or fixture"):
        load("does-not-exist")
