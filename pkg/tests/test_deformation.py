"""
Tests for deformation curves, integrability and the deformed operators
"""

import numpy as np
import pytest

from nilastheno.algebra import ComplexNilAlgebra, exterior_derivative, is_triangular, validate_algebra
from nilastheno.contraction import VectorForm01
from nilastheno.deformation import (
    DeformationCurve,
    JetDomain,
    deformed_coframe,
    del_t,
    del_t_by_projection,
    delbar_t,
    delbar_t_by_projection,
    integrability_residual,
    jet_vector_form,
    pullback_structure,
    residual_polynomials,
)
from nilastheno.errors import InvalidStructure, NotIntegrableAt
from nilastheno.exterior import InvariantForm, Monomial, parse_form
from nilastheno.fixtures import random_ex1_integrable_point, random_form
from nilastheno.scalars import ScalarDomain


def _divides(domain, factor, value) -> bool:
    return not value.numer.rem(domain.normalize_condition(factor).numer)


def _ex1_point_algebra(point):
    domain = ScalarDomain()
    terms = {
        Monomial(0b011, 0): point["a1"],
        Monomial(0b001, 0b001): point["a3"],
        Monomial(0b001, 0b010): point["a4"],
        Monomial(0b010, 0b001): point["a7"],
        Monomial(0b010, 0b010): point["a8"],
    }
    dtable = {4: InvariantForm(4, domain, {mono: domain.constant(v) for mono, v in terms.items()})}
    g = ComplexNilAlgebra(4, domain, dtable, name="ex1_point")
    phi = VectorForm01(4, domain, {(1, 1): point["t1"], (2, 2): point["t2"]})
    return g, phi


def test_ex1_integrability_polynomials(bundle):
    b = bundle("ex1_general")
    domain = b.domain
    found = residual_polynomials(b.vector_form, b.algebra)
    assert len(found) == 3
    expected = ["a1*t1*t2 - a4*t1 + a7*t2", "a2*t1*t3 - a5*t1 + a10*t3", "a6*t2*t3 - a9*t2 + a11*t3"]
    for text, value in zip(expected, found):
        assert _divides(domain, domain.parse(text), value)


def test_ex2_integrability_polynomial(bundle):
    b = bundle("ex2_identified")
    domain = b.domain
    found = residual_polynomials(b.vector_form, b.algebra)
    assert len(found) == 1
    assert _divides(domain, domain.parse("b1*t1*t2 - b3*t1 + b4*t2"), found[0])


def test_torus_is_always_integrable(bundle):
    b = bundle("torus")
    assert integrability_residual(b.vector_form, b.algebra) == []


def test_bare_vector_form_needs_algebra(bundle):
    with pytest.raises(InvalidStructure):
        integrability_residual(bundle("torus").vector_form)


def test_curve_derivative_at_zero():
    domain = ScalarDomain(["u"])
    g = ComplexNilAlgebra(2, domain)
    phi = VectorForm01.from_dict({"phi": {"1|1": "u*t + t^2", "2|1": "t/(1 + t)"}}, 2, domain)
    curve = DeformationCurve(g, phi)
    prime = curve.derivative_at_zero()
    assert prime.entry(1, 1) == domain.param("u")
    assert prime.entry(2, 1) == domain.one
    assert curve.at({"t": 1}).entry(2, 1) == domain.parse("1/2")


def test_curve_must_start_at_zero():
    domain = ScalarDomain()
    g = ComplexNilAlgebra(2, domain)
    phi = VectorForm01.from_dict({"phi": {"1|1": "1 + t"}}, 2, domain)
    with pytest.raises(InvalidStructure):
        DeformationCurve(g, phi)


def test_linear_curve(bundle):
    b = bundle("ex1_case2_numeric")
    curve = DeformationCurve.linear(b.algebra, b.vector_form)
    assert curve.derivative_at_zero() == b.vector_form


def test_deformed_coframe_round_trip(numeric_domain):
    phi = VectorForm01(2, numeric_domain, {(1, 2): "1/3"})
    coframe = deformed_coframe(phi)
    assert coframe.forward[0] == parse_form("e[1|] + 1/3*e[|2]", 2, numeric_domain)
    assert coframe.inverse_operator.compose(coframe.operator).rows == [
        [numeric_domain.one if a == b else numeric_domain.zero for b in range(4)] for a in range(4)
    ]


def test_pullback_structure(bundle):
    b = bundle("ex1_pullback")
    deformed = pullback_structure(b.vector_form, b.assignments, b.algebra)
    assert validate_algebra(deformed).d_squared_zero
    assert is_triangular(deformed)
    assert set(deformed.dtable) == {4}
    assert deformed.d_holo(4).project(0, 2) == 0


def test_pullback_off_the_integrable_locus(bundle):
    b = bundle("ex1_pullback")
    with pytest.raises(NotIntegrableAt) as info:
        pullback_structure(b.vector_form, {"t1": 0, "t2": "1/2", "t3": 0}, b.algebra)
    assert info.value.residual


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(20))
def test_deformed_operators_match_projection(seed):
    rng = np.random.default_rng(300 + seed)
    # 10 integrable points per seed, 200 in all
    for _ in range(10):
        point = random_ex1_integrable_point(rng)
        g, phi = _ex1_point_algebra(point)
        assert integrability_residual(phi, g) == []
        p, q = (int(x) for x in rng.integers(0, 3, size=2))
        alpha = random_form(rng, 4, g.domain, p, q)
        assert del_t(phi, alpha, g) == del_t_by_projection(phi, alpha, g)
        assert delbar_t(phi, alpha, g) == delbar_t_by_projection(phi, alpha, g)


def test_deformed_operators_at_phi_zero(rng, bundle):
    g = bundle("ex1_case2_numeric").specialized().algebra
    domain = g.domain
    alpha = random_form(rng, 4, domain, 1, 1)
    zero = VectorForm01.zero(4, domain)
    assert del_t(zero, alpha, g) + delbar_t(zero, alpha, g) == exterior_derivative(g, alpha)


def test_jet_arithmetic(numeric_domain):
    jets = JetDomain(numeric_domain)
    x = jets.jet(2, 3)
    y = jets.jet(1, -1)
    assert x * y == jets.jet(2, 1)
    assert x / y == jets.jet(2, 5)
    assert x - x == jets.zero
    assert jets.epsilon * jets.epsilon == jets.zero
    assert jets.conj(jets.jet("i", 1)) == jets.jet("-i", 1)
    with pytest.raises(ZeroDivisionError):
        x / jets.epsilon


def test_jet_inverse_matrix(numeric_domain):
    jets = JetDomain(numeric_domain)
    inverse = jets.inverse_matrix([[jets.jet(1, 1), jets.zero], [jets.zero, jets.jet(2, 0)]])
    assert inverse[0][0] == jets.jet(1, -1)
    assert inverse[1][1] == jets.jet("1/2", 0)


def test_jet_vector_form_has_zero_value(bundle):
    phi = bundle("ex1_case2").vector_form
    jet_phi = jet_vector_form(phi)
    for (k, j), value in jet_phi.coeffs.items():
        assert not value.value
        assert value.deriv == phi.entry(k, j)
