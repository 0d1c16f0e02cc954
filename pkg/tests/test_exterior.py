"""
Tests for invariant forms and the wedge product
"""

from math import comb

import numpy as np

import pytest
from hypothesis import given, settings, strategies as st

from nilastheno.errors import DimensionMismatch, ParseError
from nilastheno.exterior import (
    InvariantForm,
    Monomial,
    basis_monomials,
    bidegree_project,
    conjugate_form,
    merge_sign,
    parse_form,
    wedge,
)
from nilastheno.fixtures import random_form
from nilastheno.metrics import HermitianMetric, fundamental_power
from nilastheno.scalars import ScalarDomain, gaussian

from .conftest import monomial_form


def test_merge_sign():
    assert merge_sign(0b01, 0b10) == 1
    assert merge_sign(0b10, 0b01) == -1
    assert merge_sign(0b011, 0b100) == 1
    assert merge_sign(0b110, 0b001) == 1
    assert merge_sign(0b1, 0b1) == 0


def test_wedge_is_anticommutative_on_covectors(numeric_domain):
    e1 = InvariantForm.holo(3, numeric_domain, 1)
    e2 = InvariantForm.holo(3, numeric_domain, 2)
    assert e1.wedge(e2) == -e2.wedge(e1)
    assert not e1.wedge(e1)


def test_anti_before_holo_picks_up_sign(numeric_domain):
    product = InvariantForm.anti(2, numeric_domain, 1).wedge(InvariantForm.holo(2, numeric_domain, 1))
    assert product == -monomial_form(2, numeric_domain, [1], [1])


def test_monomial_constructor_applies_permutation_sign(numeric_domain):
    assert InvariantForm.monomial(3, numeric_domain, [2, 1]) == -InvariantForm.monomial(3, numeric_domain, [1, 2])
    assert not InvariantForm.monomial(3, numeric_domain, [1, 1])


def test_conjugate_of_mixed_monomial(numeric_domain):
    # conj(eta^1 ^ conj(eta^2)) = conj(eta^1) ^ eta^2 = -eta^2 ^ conj(eta^1)
    form = monomial_form(2, numeric_domain, [1], [2])
    assert form.conjugate() == -monomial_form(2, numeric_domain, [2], [1])
    assert conjugate_form(conjugate_form(form)) == form


def test_conjugate_of_top_monomial_n3(numeric_domain):
    form = monomial_form(3, numeric_domain, [1, 2, 3], [1, 2, 3])
    assert form.conjugate() == -form


def test_conjugation_is_antilinear(domain):
    form = parse_form("a*e[1|2] + i*e[1,2|]", 2, domain)
    expected = parse_form("-conj(a)*e[2|1] - i*e[|1,2]", 2, domain)
    assert form.conjugate() == expected


def test_parse_form_orders_factors(domain):
    assert parse_form("e[2,1|]", 3, domain) == -parse_form("e[1,2|]", 3, domain)
    assert parse_form("2*e[1|1] + a*e[1|1]", 2, domain) == parse_form("(2 + a)*e[1|1]", 2, domain)


def test_parse_form_wedge_syntax(domain):
    left = parse_form("e[1|] * e[|1]", 2, domain)
    assert left == parse_form("e[1|1]", 2, domain)


def test_parse_form_errors(domain):
    with pytest.raises(ParseError):
        parse_form("e[1|5]", 4, domain)
    with pytest.raises(ParseError):
        parse_form("e[1|", 4, domain)
    with pytest.raises(ParseError):
        parse_form("a / e[1|]", 2, domain)


def test_format_round_trip(domain):
    form = parse_form("a/(b+1)*e[1,2|1] - (1+i)*e[|2] + 3 - conj(c)*e[2|1,2]", 2, domain)
    assert parse_form(form.format(), 2, domain) == form


def test_dimension_mismatch(numeric_domain):
    with pytest.raises(DimensionMismatch):
        InvariantForm.holo(2, numeric_domain, 1).wedge(InvariantForm.holo(3, numeric_domain, 1))
    with pytest.raises(DimensionMismatch):
        InvariantForm.holo(2, numeric_domain, 3)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_basis_sizes(n):
    for p in range(n + 1):
        for q in range(n + 1):
            assert len(basis_monomials(n, p, q)) == comb(n, p) * comb(n, q)


def test_basis_is_sorted():
    basis = basis_monomials(3, 1, 1)
    assert basis[0] == Monomial(0b001, 0b001)
    assert [mono.sort_key() for mono in basis] == sorted(mono.sort_key() for mono in basis)


def test_projection_and_bidegree(domain):
    form = parse_form("e[1|] + e[1|2] + a*e[|1]", 2, domain)
    assert bidegree_project(form, 1, 1) == parse_form("e[1|2]", 2, domain)
    assert form.bidegree is None
    assert form.bidegrees() == [(0, 1), (1, 0), (1, 1)]
    assert bidegree_project(form, 1, 1).bidegree == (1, 1)


def test_square_of_fundamental_form(numeric_domain):
    metric = HermitianMetric.unit_diagonal(3, numeric_domain)
    omega2 = fundamental_power(metric, 2)
    expected = InvariantForm.zero(3, numeric_domain)
    for j, k in [(1, 2), (1, 3), (2, 3)]:
        expected = expected + monomial_form(3, numeric_domain, [j, k], [j, k], gaussian(0.5))
    assert omega2 == expected
    # eta^{jk|jk} = -eta^{j|j} ^ eta^{k|k}
    e11 = monomial_form(3, numeric_domain, [1], [1])
    e22 = monomial_form(3, numeric_domain, [2], [2])
    assert e11.wedge(e22) == -monomial_form(3, numeric_domain, [1, 2], [1, 2])


@pytest.mark.slow
@settings(max_examples=500, deadline=None)
@given(st.integers(0, 2**16), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
def test_graded_commutativity(seed, p1, q1, p2, q2):
    rng = np.random.default_rng(seed)
    domain = ScalarDomain()
    alpha = random_form(rng, 3, domain, p1, q1)
    beta = random_form(rng, 3, domain, p2, q2)
    sign = -1 if ((p1 + q1) * (p2 + q2)) % 2 else 1
    assert wedge(alpha, beta) == beta.wedge(alpha).scale(sign)


@pytest.mark.slow
@settings(max_examples=500, deadline=None)
@given(st.integers(0, 2**16))
def test_wedge_associative_and_conjugation_multiplicative(seed):
    rng = np.random.default_rng(seed)
    domain = ScalarDomain()
    n = int(rng.integers(2, 5))
    alpha, beta, gamma = (random_form(rng, n, domain, int(rng.integers(0, 2)), int(rng.integers(0, 2))) for _ in range(3))
    assert (alpha.wedge(beta)).wedge(gamma) == alpha.wedge(beta.wedge(gamma))
    assert alpha.wedge(beta).conjugate() == alpha.conjugate().wedge(beta.conjugate())


def test_real_part_is_fixed_by_conjugation(domain):
    form = parse_form("a*e[1|2] + e[1|1]", 2, domain)
    assert form.real_part().conjugate() == form.real_part()


def test_zero_coefficients_are_dropped(domain):
    form = parse_form("a*e[1|] - a*e[1|]", 2, domain)
    assert not form
    assert form == 0
    assert form.format() == "0"
