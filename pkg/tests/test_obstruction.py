"""
Tests for the obstruction form, its class verdicts and the first-order jet identity
"""

import numpy as np
import pytest

from nilastheno.algebra import ComplexNilAlgebra
from nilastheno.cohomology import EXACT, NONZERO_CLASS
from nilastheno.contraction import VectorForm01
from nilastheno.deformation import DeformationCurve
from nilastheno.errors import InvalidStructure, SymbolicRankRefused
from nilastheno.exterior import Monomial, parse_form
from nilastheno.fixtures import (
    list_fixtures,
    random_central_extension,
    random_ex1_instance,
    random_form,
    random_gaussian,
    random_small_vector_form,
)
from nilastheno.metrics import HermitianMetric
from nilastheno.obstruction import (
    DEFERRED,
    FAILS,
    HOLDS,
    SOLVABLE,
    UNSOLVABLE,
    VANISHES,
    corollary_check,
    obstruct,
    obstruction_form,
    taylor_consistency_check,
    theorem_check,
    two_i_imaginary,
)

TOP = "e[1,2,3|1,2,3]"
PSI = "e[1,2,3|1,2,3] - e[1,2,3|1,2,4] - e[1,2,4|1,2,3] + e[1,2,4|1,2,4]"


def _theta(b):
    return obstruction_form(b.algebra, b.metric, b.vector_form)


def test_ex1_case2_theta(bundle):
    b = bundle("ex1_case2")
    expected = parse_form(f"(a4*conj(a4) - a7*conj(a7))*a1*u2/a4*{TOP}", 4, b.domain)
    assert _theta(b) == expected


def test_ex1_case2b_theta(bundle):
    b = bundle("ex1_case2b")
    expected = parse_form(f"(a4*conj(a4) - a7*conj(a7))*a1*u1/a7*{TOP}", 4, b.domain)
    assert _theta(b) == expected


def test_ex2_case2_theta(bundle):
    b = bundle("ex2_case2")
    theta = _theta(b)
    psi = parse_form(PSI, 4, b.domain)
    assert theta == psi.scale(b.domain.parse("(b3*conj(b3) - b4*conj(b4))*b1*u2/b3"))
    assert psi.conjugate() == -psi


@pytest.mark.parametrize("name", ["ex1_case1", "ex2_case1", "torus"])
def test_theta_vanishes(bundle, name):
    b = bundle(name)
    assert not _theta(b)
    assert corollary_check(b.algebra, b.metric, b.vector_form).status == VANISHES


def test_abelian_structure_has_no_obstruction(bundle):
    b = bundle("ex1_general")
    g = b.algebra.substitute({"a1": 0, "a2": 0, "a6": 0})
    assert not obstruction_form(g, b.metric, b.vector_form)


def test_normalized_theta(bundle):
    b = bundle("ex1_case2")
    report = obstruct(b.algebra, b.metric, b.vector_form)
    assert report.theta_normalized == report.theta.scale(-2)
    assert report.designated_monomial == Monomial(0b0111, 0b0111)
    assert report.monomial_scalar == b.domain.parse("(a4*conj(a4) - a7*conj(a7))*a1*u2/a4")
    assert report.normalized_monomial_scalar == b.domain.parse("2*(a7*conj(a7) - a4*conj(a4))*a1*u2/a4")
    assert report.to_dict(b.domain)["normalized_monomial_scalar"] == b.domain.format(report.normalized_monomial_scalar)
    assert report.theorem_verdict is None


def test_two_i_imaginary(domain):
    theta = parse_form(f"a*{TOP}", 4, domain)
    assert two_i_imaginary(theta) == parse_form(f"(a + conj(a))*{TOP}", 4, domain)


def test_symbolic_corollary_ex1(bundle):
    b = bundle("ex1_case2")
    domain = b.domain
    verdict = corollary_check(b.algebra, b.metric, b.vector_form)
    assert verdict.status == DEFERRED
    scalar = domain.parse("(a4*conj(a4) - a7*conj(a7))*a1*u2/a4")
    assert verdict.conditions == [domain.normalize_condition(domain.realpart(scalar))]
    assert verdict.hypotheses == ["a4 != 0", "metric is astheno-Kaehler"]
    assert verdict.pattern == parse_form(TOP, 4, domain)
    assert verdict.condition_display.startswith("(a4*conj(a4) - a7*conj(a7))*re(")
    assert verdict.condition_display.endswith(" = 0")
    assert verdict.to_dict(domain)["status"] == DEFERRED


def test_symbolic_corollary_ex2(bundle):
    b = bundle("ex2_case2")
    domain = b.domain
    verdict = corollary_check(b.algebra, b.metric, b.vector_form)
    assert verdict.status == DEFERRED
    scalar = domain.parse("(b3*conj(b3) - b4*conj(b4))*b1*u2/b3")
    assert verdict.conditions == [domain.normalize_condition(domain.realpart(scalar))]
    assert verdict.hypotheses == ["b3 != 0", "metric is astheno-Kaehler"]


def test_symbolic_pattern_refused(bundle):
    b = bundle("ex1_case2")
    domain = b.domain
    theta = parse_form("a4*e[1,2,3|1,2,3] + e[1,2,3|1,2,4]", 4, domain)
    with pytest.raises(SymbolicRankRefused):
        corollary_check(b.algebra, b.metric, b.vector_form, theta)
    with pytest.raises(SymbolicRankRefused):
        theorem_check(b.algebra, b.metric, b.vector_form)


def test_numeric_ex1_is_obstructed(bundle):
    b = bundle("ex1_case2_numeric").specialized()
    report = obstruct(b.algebra, b.metric, b.vector_form)
    assert report.theta == parse_form(TOP, 4, b.domain)
    assert report.corollary_verdict.status == NONZERO_CLASS
    assert report.corollary_verdict.imaginary_verdict.status == NONZERO_CLASS
    assert report.theorem_verdict.status == UNSOLVABLE
    assert report.theorem_verdict.certificate
    data = report.to_dict(b.domain)
    assert data["theorem"]["status"] == UNSOLVABLE
    assert data["designated_monomial"] == TOP


def test_numeric_ex1_imaginary_direction_is_solvable(bundle):
    b = bundle("ex1_case2_numeric").specialized({"u2": "i", "u3": 0})
    verdict = theorem_check(b.algebra, b.metric, b.vector_form)
    assert verdict.status == SOLVABLE
    assert not verdict.target
    assert not verdict.witness
    corollary = corollary_check(b.algebra, b.metric, b.vector_form)
    assert corollary.imaginary_verdict.status == EXACT


def test_numeric_ex2_is_obstructed(bundle):
    b = bundle("ex2_case2_numeric").specialized()
    theta = _theta(b)
    assert theta == parse_form(PSI, 4, b.domain).scale(b.domain.parse("3/2"))
    assert corollary_check(b.algebra, b.metric, b.vector_form).status == NONZERO_CLASS
    assert theorem_check(b.algebra, b.metric, b.vector_form).status == UNSOLVABLE


def test_theorem_with_given_omega_prime(bundle):
    b = bundle("ex1_case2_numeric").specialized()
    domain = b.domain
    assert theorem_check(b.algebra, b.metric, b.vector_form, parse_form("e[3,4|3,4]", 4, domain)).status == FAILS
    imaginary = bundle("ex1_case2_numeric").specialized({"u2": "i", "u3": 0})
    zero = parse_form("0", 4, domain)
    assert theorem_check(imaginary.algebra, imaginary.metric, imaginary.vector_form, zero).status == HOLDS
    with pytest.raises(InvalidStructure):
        theorem_check(b.algebra, b.metric, b.vector_form, parse_form("e[1|1]", 4, domain))


def test_dimension_checks(numeric_domain):
    g = ComplexNilAlgebra(1, numeric_domain)
    with pytest.raises(InvalidStructure):
        obstruction_form(g, HermitianMetric.unit_diagonal(1, numeric_domain), VectorForm01.zero(1, numeric_domain))
    g4 = ComplexNilAlgebra(4, numeric_domain)
    with pytest.raises(InvalidStructure):
        obstruction_form(g4, HermitianMetric.unit_diagonal(3, numeric_domain), VectorForm01.zero(4, numeric_domain))


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(50))
def test_theta_is_a_multiple_of_the_top_monomial_in_dimension_five(seed):
    rng = np.random.default_rng(500 + seed)
    g = random_central_extension(rng, 5)
    domain = g.domain
    m = HermitianMetric.unit_diagonal(5, domain)
    phi = VectorForm01(5, domain, {(k, k): random_gaussian(rng) for k in range(1, 5)})
    theta = obstruction_form(g, m, phi)
    assert {mono for mono, _ in theta.items()} <= {Monomial(0b1111, 0b1111)}

    abelian = ComplexNilAlgebra(5, domain, {5: g.d_holo(5).project(1, 1)})
    assert not obstruction_form(abelian, m, phi)


@pytest.mark.slow
@pytest.mark.parametrize("name", list_fixtures())
def test_taylor_identity_on_fixtures(bundle, name):
    # every shipped fixture carries a metric and a vector form
    b = bundle(name).specialized()
    check = taylor_consistency_check(b.algebra, b.metric, b.vector_form)
    assert check.holds
    theta = _theta(b)
    assert check.t_coefficient == theta.conjugate() - theta
    assert check.to_dict()["holds"] is True


def test_taylor_identity_on_symbolic_curve(bundle):
    b = bundle("ex1_case2")
    curve = DeformationCurve.linear(b.algebra, b.vector_form)
    assert taylor_consistency_check(b.algebra, b.metric, curve).holds


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(100))
def test_taylor_identity_on_random_data(seed):
    rng = np.random.default_rng(700 + seed)
    g = random_ex1_instance(rng)
    domain = g.domain
    m = HermitianMetric.unit_diagonal(4, domain)
    phi = random_small_vector_form(rng, 4, domain, entries=3)
    omega_prime = random_form(rng, 4, domain, 2, 2)
    assert taylor_consistency_check(g, m, phi, omega_prime).holds


def test_obstruct_on_torus_reports_vanishing(bundle):
    b = bundle("torus").specialized({"u1": 1, "u2": "i"})
    report = obstruct(b.algebra, b.metric, b.vector_form)
    assert not report.theta
    assert report.corollary_verdict.status == VANISHES
    assert report.theorem_verdict.status == SOLVABLE
    assert report.monomial_scalar is None
    assert report.normalized_monomial_scalar is None
