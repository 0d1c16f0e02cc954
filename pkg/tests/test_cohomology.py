"""
Tests for invariant Bott-Chern cohomology
"""

from math import comb

import numpy as np
import pytest

from nilastheno.algebra import ComplexNilAlgebra, ddbar
from nilastheno.cohomology import (
    EXACT,
    NONZERO_CLASS,
    NOT_CLOSED,
    bc_class_vanishes,
    bc_space,
    bc_table,
    ddbar_matrix,
    harmonicity_conditions,
    is_bc_harmonic,
    solve_ddbar,
)
from nilastheno.errors import InvalidStructure, SymbolicRankRefused
from nilastheno.exterior import InvariantForm, basis_monomials, parse_form
from nilastheno.fixtures import random_central_extension, random_ex1_instance
from nilastheno.metrics import HermitianMetric, check_special_metric
from nilastheno.scalars import ScalarDomain

from .conftest import monomial_form


def _top(g):
    k = g.n - 1
    return monomial_form(g.n, g.domain, range(1, k + 1), range(1, k + 1))


@pytest.mark.parametrize("n", [3, 4])
def test_torus_dimensions(n):
    g = ComplexNilAlgebra(n, ScalarDomain(), name="torus")
    table = bc_table(g)
    for (p, q), dim in table.items():
        assert dim == comb(n, p) * comb(n, q)


def test_h00_is_one(bundle):
    g = bundle("ex1_case2_numeric").specialized().algebra
    assert bc_space(g, 0, 0).dimension == 1


def test_space_representatives_are_closed(bundle):
    g = bundle("ex1_case2_numeric").specialized().algebra
    space = bc_space(g, 1, 1)
    assert space.dimension == len(space.basis)
    assert space.kernel_dimension - space.image_rank == space.dimension
    for form in space.basis:
        assert form.bidegree == (1, 1)
        assert bc_class_vanishes(g, form).status == NONZERO_CLASS
    assert space.to_dict()["fingerprint"] == space.fingerprint


def test_symbolic_algebra_is_refused(bundle):
    g = bundle("ex1_general").algebra
    with pytest.raises(SymbolicRankRefused):
        bc_space(g, 1, 1)
    with pytest.raises(SymbolicRankRefused):
        bc_class_vanishes(g, parse_form("e[1|1]", 4, g.domain))


def test_bad_bidegree_and_method(bundle):
    g = bundle("ex1_case2_numeric").specialized().algebra
    with pytest.raises(InvalidStructure):
        bc_space(g, 5, 0)
    with pytest.raises(InvalidStructure):
        bc_space(g, 1, 1, method="LU")
    with pytest.raises(InvalidStructure):
        bc_class_vanishes(g, parse_form("e[1|1] + e[1,2|]", 4, g.domain))


@pytest.mark.parametrize("seed", range(30))
def test_top_class_nonzero_iff_skt(seed):
    rng = np.random.default_rng(1000 + seed)
    g = random_ex1_instance(rng, skt=bool(seed % 2))
    m = HermitianMetric.unit_diagonal(4, g.domain)
    skt = check_special_metric(g, m, "skt").satisfied
    verdict = bc_class_vanishes(g, _top(g))
    assert (verdict.status == NONZERO_CLASS) == skt
    if verdict.status == EXACT:
        assert ddbar(g, verdict.witness) == _top(g)


@pytest.mark.parametrize("seed", range(6))
def test_top_class_in_dimension_five(seed):
    rng = np.random.default_rng(2000 + seed)
    g = random_central_extension(rng, 5)
    m = HermitianMetric.unit_diagonal(5, g.domain)
    skt = check_special_metric(g, m, "skt").satisfied
    assert (bc_class_vanishes(g, _top(g)).status == NONZERO_CLASS) == skt


def test_certificate_separates_target(bundle):
    g = bundle("ex1_case2_numeric").specialized().algebra
    target = _top(g)
    result = solve_ddbar(g, target, 3, 3)
    assert not result.solvable
    domain = g.domain
    pair = lambda form: sum((value * form.coefficient(mono) for mono, value in result.certificate.items()), domain.zero)
    assert pair(target)
    for mono in basis_monomials(4, 2, 2):
        assert not pair(ddbar(g, InvariantForm(4, domain, {mono: domain.one})))


def test_solve_zero_target(bundle):
    g = bundle("ex1_case2_numeric").specialized().algebra
    result = solve_ddbar(g, parse_form("0", 4, g.domain), 3, 3)
    assert result.solvable and not result.witness


def test_not_closed(bundle):
    g = bundle("ex1_case2_numeric").specialized().algebra
    verdict = bc_class_vanishes(g, parse_form("e[4|]", 4, g.domain))
    assert verdict.status == NOT_CLOSED
    assert not verdict.vanishes


def test_exact_form_has_witness(rng):
    g = random_ex1_instance(rng, skt=False)
    exact = ddbar(g, parse_form("e[4|4]", 4, g.domain))
    assert exact
    verdict = bc_class_vanishes(g, exact)
    assert verdict.status == EXACT
    assert ddbar(g, verdict.witness) == exact


@pytest.mark.parametrize("seed", range(4))
def test_pivot_methods_agree(seed):
    rng = np.random.default_rng(3000 + seed)
    g = random_ex1_instance(rng)
    for p, q in [(1, 1), (2, 2), (2, 1), (3, 3)]:
        assert bc_space(g, p, q, method="GJ").dimension == bc_space(g, p, q, method="FF").dimension


def test_ddbar_matrix_shape(bundle):
    g = bundle("ex1_case2_numeric").specialized().algebra
    assert ddbar_matrix(g, 2, 2).shape == (36, 16)


@pytest.mark.parametrize("seed", range(6))
def test_harmonic_forms_are_nonzero_classes(seed):
    rng = np.random.default_rng(4000 + seed)
    g = random_ex1_instance(rng, skt=bool(seed % 2))
    m = HermitianMetric.unit_diagonal(4, g.domain)
    harmonic = is_bc_harmonic(g, m, _top(g))
    assert harmonic == bool(seed % 2)
    assert (harmonicity_conditions(g, m, _top(g)) == []) == harmonic
    if harmonic:
        assert bc_class_vanishes(g, _top(g)).status == NONZERO_CLASS


def test_harmonicity_on_symbolic_family(bundle):
    b = bundle("ex1_case2")
    conditions = harmonicity_conditions(b.algebra, b.metric, _top(b.algebra))
    assert conditions
    skt = check_special_metric(b.algebra, b.metric, "skt")
    domain = b.domain
    assert {domain.normalize_condition(c) for c in conditions} == set(skt.independent)
