"""
Shared pytest fixtures
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Run against the source tree without installing
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from nilastheno.exterior import InvariantForm, Monomial  # noqa: E402
from nilastheno.fixtures import fixture_bundle  # noqa: E402
from nilastheno.scalars import ScalarDomain  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: randomized checks at full trial counts (deselect with -m 'not slow')")


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture
def numeric_domain():
    return ScalarDomain()


@pytest.fixture
def domain():
    return ScalarDomain(["a", "b", "c"])


@pytest.fixture
def bundle():
    """Factory: fixture name -> FixtureBundle."""
    return fixture_bundle


def top_monomial(n: int, holo, anti) -> Monomial:
    return Monomial(sum(1 << (k - 1) for k in holo), sum(1 << (k - 1) for k in anti))


def monomial_form(n: int, domain, holo, anti, coeff=1) -> InvariantForm:
    return InvariantForm(n, domain, {top_monomial(n, holo, anti): domain.convert(coeff)})
