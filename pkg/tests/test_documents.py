import json

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DATA, load_doc, two_action
from lexiplan.documents import (
    dumps,
    emit_document,
    emit_instance,
    emit_policy,
    load_schema,
    parse_document,
    parse_instance,
    parse_policy,
)
from lexiplan.errors import DocumentError, DuplicateEntry, ValidationFailed
from lexiplan.generators import generate_random, random_rewards, random_taus
from lexiplan.model import RowNotStochastic

MINIMAL = {
    "name": "tiny",
    "num_states": 2,
    "num_actions": 1,
    "horizon": 1,
    "end_states": [1],
    "initial_distribution": [1.0, 0.0],
    "transitions": [[0, 0, 1, 1.0], [1, 0, 1, 1.0]],
}


def doc(**changes):
    d = json.loads(json.dumps(MINIMAL))
    d.update(changes)
    return json.dumps(d)


def test_minimal_document_round_trip():
    inst = parse_instance(doc())
    assert inst.end_states == (1,)
    assert inst.transitions[0, 0, 1] == 1.0
    text = emit_instance(inst)
    assert parse_instance(text) == inst
    assert emit_instance(parse_instance(text)) == text


def test_duplicate_entry():
    with pytest.raises(DuplicateEntry) as info:
        parse_document(doc(transitions=[[0, 0, 1, 0.5], [0, 0, 1, 0.5], [1, 0, 1, 1.0]]))
    assert info.value.key == (0, 0, 1)
    assert info.value.location == "transitions[1]"


@pytest.mark.parametrize(
    "text, location",
    [
        ('{"name": 1,', "line 1 column 12"),
        (doc(num_states="two"), "num_states"),
        (doc(transitions=[[0, 0, 1]]), "transitions/0"),
        (doc(transitions=[[0, 0, 5, 1.0]]), "transitions[0]"),
        (doc(initial_distribution=[1.0]), "initial_distribution"),
        (doc(extra=1), "<root>"),
    ],
)
def test_error_locations(text, location):
    with pytest.raises(DocumentError) as info:
        parse_document(text)
    assert info.value.location == location


def test_semantic_violation_is_a_validation_failure():
    with pytest.raises(ValidationFailed) as info:
        parse_document(doc(transitions=[[0, 0, 1, 0.5], [1, 0, 1, 1.0]]))
    assert isinstance(info.value.violations[0], RowNotStochastic)
    assert "transitions" in info.value.context


@pytest.mark.parametrize("name", ["two_action", "all_timeout", "exact_boundary", "random_small", "hazard_grid"])
def test_checked_in_documents_are_canonical(name):
    text = (DATA / f"{name}.json").read_text()
    assert emit_document(parse_document(text)) == text


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_emit_parse_is_lossless(seed):
    inst = generate_random(5, 2, 3, 2, density=0.6, seed=seed)
    rewards = random_rewards(inst, 2, seed=seed)
    taus = random_taus(2, seed=seed)
    text = emit_instance(inst, rewards, taus)
    back = parse_document(text)
    assert back.instance == inst
    assert np.array_equal(back.rewards.levels, rewards.levels)
    assert back.objective.taus == taus
    assert emit_document(back) == text


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_formatting_round_trips(x):
    assert json.loads(dumps([x])) == [x]


def test_dumps_rejects_non_finite():
    with pytest.raises(ValueError):
        dumps([float("nan")])


def test_dumps_sorts_keys():
    assert dumps({"b": 1, "a": [0.0, 0.5]}) == '{\n  "a": [0, 0.5],\n  "b": 1\n}\n'


@pytest.mark.parametrize("name", ["instance", "policy"])
def test_schemas_are_valid(name):
    jsonschema.Draft202012Validator.check_schema(load_schema(name))


def test_emitted_documents_match_schemas():
    inst = two_action()
    jsonschema.validate(json.loads(emit_instance(inst)), load_schema("instance"))
    jsonschema.validate(json.loads(emit_policy([[1, 0, 0]])), load_schema("policy"))


def test_policy_round_trip():
    pol = np.array([[1, 0, 0], [0, 1, 1]])
    assert np.array_equal(parse_policy(emit_policy(pol)), pol)
    with pytest.raises(DocumentError):
        parse_policy('{"policy": [[0, 1], [0]]}')


def test_objective_is_validated():
    with pytest.raises(DocumentError) as info:
        parse_document(doc(objective=[0.5, 0.25]))
    assert info.value.location == "objective"


def test_load_doc_carries_objective():
    d = load_doc("exact_boundary")
    assert d.objective.taus == (0.5, 0.625)
