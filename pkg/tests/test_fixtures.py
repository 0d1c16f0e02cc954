"""
Tests for the shipped fixtures, random instances and the Gaussian search
"""

import json

import pytest

from nilastheno.algebra import validate_algebra
from nilastheno.errors import InvalidStructure, ParseError
from nilastheno.fixtures import (
    FixtureBundle,
    _modulus_squared,
    list_fixtures,
    load_fixture,
    random_central_extension,
    random_ex1_instance,
    random_ex1_integrable_point,
    random_gaussian,
    search_ex2_instances,
)
from nilastheno.metrics import HermitianMetric, check_special_metric

EXPECTED_FIXTURES = [
    "ex1_case1",
    "ex1_case2",
    "ex1_case2_numeric",
    "ex1_case2b",
    "ex1_general",
    "ex1_pullback",
    "ex2_case1",
    "ex2_case2",
    "ex2_case2_numeric",
    "ex2_case2b",
    "ex2_general",
    "ex2_identified",
    "torus",
]


def test_list_fixtures():
    assert list_fixtures() == EXPECTED_FIXTURES


@pytest.mark.parametrize("name", EXPECTED_FIXTURES)
def test_every_fixture_is_a_valid_algebra(bundle, name):
    fixture = bundle(name)
    assert fixture.name == name
    report = validate_algebra(fixture.algebra)
    assert report.d_squared_zero
    assert report.nilpotent


def test_unknown_fixture():
    with pytest.raises(InvalidStructure, match="Unknown fixture"):
        load_fixture("missing")


def test_bundle_from_dict_defaults():
    bundle = FixtureBundle.from_dict({"algebra": {"n": 2, "d": {"2": "e[1|1]"}}}, "small")
    assert bundle.name == "small"
    assert bundle.metric.is_unit_diagonal
    assert bundle.vector_form is None
    assert bundle.assignments == {}
    with pytest.raises(ParseError):
        FixtureBundle.from_dict({"n": 2})


def test_specialized_uses_own_assignment(bundle):
    fixture = bundle("ex1_case2_numeric")
    assert fixture.assignments == {"u2": "1", "u3": "0"}
    specialized = fixture.specialized()
    assert specialized.assignments == {}
    assert specialized.vector_form.coeffs == {(2, 2): specialized.domain.one}


def test_ex2_numeric_matches_identified_family(bundle):
    data = load_fixture("ex2_case2_numeric")
    values = {"b1": "1", "b3": "2", "b4": "1", "b2": "1", "b5": "3", "a2": "1", "a5": "3"}
    identified = bundle("ex2_identified").specialized(values)
    numeric = bundle("ex2_case2_numeric")
    for j in (3, 4):
        assert identified.algebra.dtable[j].format() == numeric.algebra.dtable[j].format()
    assert set(data["verification"].values()) == {"6"}
    assert check_special_metric(identified.algebra, identified.metric, "astheno").satisfied


def test_random_gaussian_bounds(rng):
    for _ in range(50):
        value = random_gaussian(rng, bound=2, max_denominator=3, allow_zero=False)
        assert value
        assert abs(value.x) <= 2
        assert abs(value.y) <= 2


@pytest.mark.parametrize("skt", [True, False])
def test_random_ex1_instance_skt_flag(rng, skt):
    for _ in range(5):
        g = random_ex1_instance(rng, skt=skt)
        m = HermitianMetric.unit_diagonal(4, g.domain)
        assert g.is_numeric()
        assert check_special_metric(g, m, "skt").satisfied is skt


@pytest.mark.parametrize("n", [3, 4, 5])
def test_random_central_extension_is_valid(rng, n):
    g = random_central_extension(rng, n)
    assert list(g.dtable) == [n]
    assert validate_algebra(g).d_squared_zero


def test_random_central_extension_needs_two_dimensions(rng):
    with pytest.raises(InvalidStructure):
        random_central_extension(rng, 1)


def test_random_integrable_point(rng):
    for _ in range(10):
        point = random_ex1_integrable_point(rng)
        a1, a4, a7, t1, t2 = (point[name] for name in ("a1", "a4", "a7", "t1", "t2"))
        assert not a1 * t1 * t2 - a4 * t1 + a7 * t2
        assert _modulus_squared(t1) * 4 < 1
        assert a4 - a1 * t2


def test_search_first_hit():
    (hit,) = search_ex2_instances(bound=1)
    assert hit == {"b1": -1, "b3": -1, "b4": 0, "b2": -1, "b5": -1, "a2": -1, "a5": -1}


def test_search_respects_limit():
    hits = search_ex2_instances(bound=1, limit=3)
    assert len(hits) == 3
    for hit in hits:
        s = hit["b1"] ** 2 + hit["b3"] ** 2 + hit["b4"] ** 2
        assert 2 * hit["b5"] * hit["b2"] == s
        assert hit["a2"] * hit["b5"] + hit["a5"] * hit["b2"] == s
        assert abs(hit["b3"]) != abs(hit["b4"])


def test_fixture_files_are_json():
    for name in EXPECTED_FIXTURES:
        data = load_fixture(name)
        assert json.loads(json.dumps(data)) == data
        assert "algebra" in data
