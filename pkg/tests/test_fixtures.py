import json

import pytest

from tdq import engine, leonard
from tdq.fixtures import (
    FixtureFormatError,
    fixture_from_leonard,
    fixture_from_suite,
    parse_fixture,
    read_fixture,
    write_fixture,
)
from tdq.scalars import rational_field

from conftest import make_params

QF = rational_field()


def leonard_fixture(d=1):
    p = make_params(QF, d=d)
    return fixture_from_leonard(leonard.leonard_suite(p, "u"))


def test_round_trip_equality(tmp_path):
    fixture = leonard_fixture()
    path = tmp_path / "f.json"
    write_fixture(str(path), fixture)
    loaded = read_fixture(str(path))
    assert loaded.matrices == fixture.matrices
    assert loaded.params == fixture.params
    assert loaded.basis == fixture.basis
    assert loaded.field == fixture.field


def test_suite_fixture_includes_subspaces(tmp_path):
    p = make_params(QF, d=1)
    ls = leonard.leonard_suite(p, "u")
    suite = engine.derive_suite(ls.A, K=ls.K, params=p)
    fixture = fixture_from_suite(suite)
    assert fixture.basis == "abstract"
    assert set(fixture.subspaces) == {"U0", "U1", "Udd0", "Udd1", "W0", "W1"}
    path = tmp_path / "s.json"
    write_fixture(str(path), fixture)
    loaded = read_fixture(str(path))
    assert loaded.subspaces == fixture.subspaces


def test_deterministic_serialization(tmp_path):
    fixture = leonard_fixture(d=2)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_fixture(str(p1), fixture)
    write_fixture(str(p2), fixture)
    assert p1.read_bytes() == p2.read_bytes()


@pytest.mark.parametrize("mangle", [
    lambda d: d.pop("format"),
    lambda d: d.update(format="tdq-fixture/9"),
    lambda d: d.pop("field"),
    lambda d: d.update(basis="z"),
    lambda d: d["matrices"].update(A=[["1", "2"], ["3"]]),
    lambda d: d["matrices"].update(A=[["1", "nope ("], ["3", "4"]]),
    lambda d: d["params"].update(q="0"),
])
def test_malformed_documents_rejected(mangle):
    doc = leonard_fixture().to_dict()
    mangle(doc)
    with pytest.raises((FixtureFormatError, ValueError)):
        parse_fixture(doc)


def test_scalars_serialized_as_grammar_strings():
    doc = leonard_fixture().to_dict()
    payload = json.dumps(doc)
    for row in doc["matrices"]["M"]:
        for entry in row:
            assert isinstance(entry, str)
    assert "3/4" in payload
