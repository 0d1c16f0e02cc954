"""
Fixture Corpus
Shipped example families, random numeric instances and the small Gaussian search used to find them
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import combinations, product
from typing import Dict, Iterable, List, Optional

import numpy as np
from tqdm import tqdm

from .algebra import ComplexNilAlgebra
from .contraction import VectorForm01
from .errors import InvalidStructure, ParseError
from .exterior import InvariantForm, Monomial, basis_monomials
from .metrics import HermitianMetric
from .scalars import ScalarDomain, conjugate_gaussian, gaussian

logger = logging.getLogger(__name__)

FIXTURE_PACKAGE = "nilastheno.data"


def list_fixtures() -> List[str]:
    """Names of the shipped fixtures, sorted."""
    files = resources.files(FIXTURE_PACKAGE).iterdir()
    return sorted(entry.name[:-5] for entry in files if entry.name.endswith(".json"))


def load_fixture(name: str) -> dict:
    """
    Read a shipped fixture as raw JSON data

    Args:
        name: Fixture name without extension

    Returns:
        Mapping with keys algebra, metric, vector_form, assignments
    """
    resource = resources.files(FIXTURE_PACKAGE) / f"{name}.json"
    if not resource.is_file():
        raise InvalidStructure(f"Unknown fixture '{name}'; available: {', '.join(list_fixtures())}")
    try:
        return json.loads(resource.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"Fixture '{name}' is not valid JSON: {e.msg}", position=e.pos) from e


@dataclass
class FixtureBundle:
    """Algebra, metric, vector form and default assignment of one fixture"""

    name: str
    algebra: ComplexNilAlgebra
    metric: HermitianMetric
    vector_form: Optional[VectorForm01] = None
    assignments: Dict[str, str] = field(default_factory=dict)

    @property
    def domain(self) -> ScalarDomain:
        return self.algebra.domain

    @classmethod
    def from_dict(cls, data: dict, name: str = "") -> "FixtureBundle":
        if "algebra" not in data:
            raise ParseError("Fixture data needs an 'algebra' entry")
        name = name or data.get("name", "")
        algebra = ComplexNilAlgebra.from_dict(data["algebra"], name=name)
        domain, n = algebra.domain, algebra.n
        metric = HermitianMetric.from_dict(data.get("metric", {"metric": "diagonal"}), n, domain)
        vector_data = data.get("vector_form") or data.get("curve")
        vector_form = VectorForm01.from_dict(vector_data, n, domain) if vector_data else None
        assignments = {key: str(value) for key, value in (data.get("assignments") or {}).items()}
        return cls(name, algebra, metric, vector_form, assignments)

    def specialized(self, assignment: Optional[Dict[str, object]] = None) -> "FixtureBundle":
        """Substitute an assignment (the bundle's own by default) everywhere."""
        assignment = self.assignments if assignment is None else assignment
        domain = self.domain
        substitute = lambda value: domain.substitute(value, assignment)
        metric = HermitianMetric(
            self.metric.n, domain, [[substitute(value) for value in row] for row in self.metric.F]
        )
        vector_form = self.vector_form.map_coefficients(substitute) if self.vector_form is not None else None
        return FixtureBundle(self.name, self.algebra.substitute(assignment), metric, vector_form, {})


def fixture_bundle(name: str) -> FixtureBundle:
    return FixtureBundle.from_dict(load_fixture(name), name)


# Random numeric instances


def random_gaussian(rng: np.random.Generator, bound: int = 3, max_denominator: int = 2, allow_zero: bool = True):
    """Gaussian rational with numerators in [-bound, bound] and denominators in [1, max_denominator]."""
    while True:
        re_num, im_num = (int(x) for x in rng.integers(-bound, bound + 1, size=2))
        re_den, im_den = (int(x) for x in rng.integers(1, max_denominator + 1, size=2))
        value = gaussian(Fraction(re_num, re_den), Fraction(im_num, im_den))
        if allow_zero or value:
            return value


def _fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _modulus_squared(z) -> Fraction:
    return _fraction(z.x) ** 2 + _fraction(z.y) ** 2


def random_ex1_instance(rng: np.random.Generator, skt: Optional[bool] = None, bound: int = 3) -> ComplexNilAlgebra:
    """
    Numeric member of the reduced first family d(eta^4) = a1 e12 + a3 e1|1 + a4 e1|2 + a7 e2|1 + a8 e2|2.

    Args:
        rng: numpy generator
        skt: True forces a3 = 1, a8 = (|a1|^2 + |a4|^2 + |a7|^2)/2; False draws until the
            SKT identity fails; None leaves it to chance
        bound: Numerator bound of the random entries

    Returns:
        ComplexNilAlgebra over the parameter-free domain
    """
    domain = ScalarDomain()
    while True:
        a1 = random_gaussian(rng, bound, allow_zero=False)
        a4 = random_gaussian(rng, bound, allow_zero=False)
        a7 = random_gaussian(rng, bound)
        if skt:
            a3 = gaussian(1)
            a8 = gaussian((_modulus_squared(a1) + _modulus_squared(a4) + _modulus_squared(a7)) / 2)
        else:
            a3, a8 = random_gaussian(rng, bound), random_gaussian(rng, bound)
        residual = _modulus_squared(a1) + _modulus_squared(a4) + _modulus_squared(a7) - 2 * _fraction((a3 * conjugate_gaussian(a8)).x)
        if skt is False and residual == 0:
            continue
        break
    terms = {
        Monomial(0b011, 0): a1,
        Monomial(0b001, 0b001): a3,
        Monomial(0b001, 0b010): a4,
        Monomial(0b010, 0b001): a7,
        Monomial(0b010, 0b010): a8,
    }
    dtable = {4: InvariantForm(4, domain, {mono: domain.constant(v) for mono, v in terms.items()})}
    return ComplexNilAlgebra(4, domain, dtable, name="ex1_random")


def random_central_extension(rng: np.random.Generator, n: int, density: float = 0.6, bound: int = 2) -> ComplexNilAlgebra:
    """
    d(eta^j) = 0 for j < n and d(eta^n) a random combination of eta^{jk} and eta^{j|k} with j, k < n.

    d^2 = 0 holds automatically.
    """
    if n < 2:
        raise InvalidStructure("A central extension needs n >= 2")
    domain = ScalarDomain()
    lower = range(1, n)
    candidates = [Monomial((1 << (j - 1)) | (1 << (k - 1)), 0) for j, k in combinations(lower, 2)]
    candidates += [Monomial(1 << (j - 1), 1 << (k - 1)) for j, k in product(lower, repeat=2)]
    terms = {}
    for mono in candidates:
        if rng.random() < density:
            terms[mono] = domain.constant(random_gaussian(rng, bound, allow_zero=False))
    if not terms:
        terms[candidates[0]] = domain.one
    return ComplexNilAlgebra(n, domain, {n: InvariantForm(n, domain, terms)}, name=f"central_extension_{n}")


def random_nilpotent_algebra(rng: np.random.Generator, n: int, density: float = 0.4, bound: int = 2) -> ComplexNilAlgebra:
    """
    Random two-step structure: d(eta^j) = 0 for j <= n/2, and for the others
    d(eta^j) is built from eta^{ab}, eta^{a|b} with a, b <= n/2.
    """
    domain = ScalarDomain()
    half = max(1, n // 2)
    lower = range(1, half + 1)
    candidates = [Monomial((1 << (a - 1)) | (1 << (b - 1)), 0) for a, b in combinations(lower, 2)]
    candidates += [Monomial(1 << (a - 1), 1 << (b - 1)) for a, b in product(lower, repeat=2)]
    dtable = {}
    for j in range(half + 1, n + 1):
        terms = {
            mono: domain.constant(random_gaussian(rng, bound, allow_zero=False))
            for mono in candidates
            if rng.random() < density
        }
        dtable[j] = InvariantForm(n, domain, terms)
    return ComplexNilAlgebra(n, domain, dtable, name=f"two_step_{n}")


def random_form(rng: np.random.Generator, n: int, domain: ScalarDomain, p: int, q: int, terms: int = 3) -> InvariantForm:
    """A (p,q)-form with up to `terms` random Gaussian coefficients."""
    basis = basis_monomials(n, p, q)
    if not basis:
        return InvariantForm.zero(n, domain)
    picks = rng.choice(len(basis), size=min(terms, len(basis)), replace=False)
    return InvariantForm(
        n, domain, {basis[int(i)]: domain.constant(random_gaussian(rng, allow_zero=False)) for i in picks}
    )


def random_mixed_form(rng: np.random.Generator, n: int, domain: ScalarDomain, max_degree: int = 3) -> InvariantForm:
    """Sum of random homogeneous pieces across bidegrees of total degree <= max_degree."""
    total = InvariantForm.zero(n, domain)
    for p, q in product(range(n + 1), repeat=2):
        if p + q <= max_degree and rng.random() < 0.3:
            total = total + random_form(rng, n, domain, p, q, terms=2)
    return total


def random_vector_form(rng: np.random.Generator, n: int, domain: ScalarDomain, entries: int = 3, bound: int = 2) -> VectorForm01:
    keys = list(product(range(1, n + 1), repeat=2))
    picks = rng.choice(len(keys), size=min(entries, len(keys)), replace=False)
    return VectorForm01(
        n, domain, {keys[int(i)]: domain.constant(random_gaussian(rng, bound, allow_zero=False)) for i in picks}
    )


def random_small_vector_form(rng: np.random.Generator, n: int, domain: ScalarDomain, entries: int = 2) -> VectorForm01:
    """Entries of modulus below 1/2, keeping I - phi conj(phi) invertible."""
    keys = list(product(range(1, n + 1), repeat=2))
    picks = rng.choice(len(keys), size=min(entries, len(keys)), replace=False)
    coeffs = {}
    for i in picks:
        value = gaussian(Fraction(int(rng.integers(-2, 3)), 5 * n), Fraction(int(rng.integers(-2, 3)), 5 * n))
        if value:
            coeffs[keys[int(i)]] = domain.constant(value)
    return VectorForm01(n, domain, coeffs)


def ex1_integrable_t1(a1, a4, a7, t2):
    """t1 = a7 t2 / (a4 - a1 t2), the point where a1 t1 t2 - a4 t1 + a7 t2 = 0."""
    denominator = a4 - a1 * t2
    if not denominator:
        raise ZeroDivisionError("a4 - a1*t2 vanishes")
    return a7 * t2 / denominator


def random_ex1_integrable_point(rng: np.random.Generator) -> Dict[str, object]:
    """
    Random numeric point of the reduced first family with phi = t1 e1|Z1 + t2 e2|Z2 integrable.

    Returns:
        Mapping with keys a1, a3, a4, a7, a8, t1, t2 (Gaussian rationals, |t| small)
    """
    while True:
        a1, a4 = random_gaussian(rng, allow_zero=False), random_gaussian(rng, allow_zero=False)
        a7 = random_gaussian(rng)
        t2 = gaussian(Fraction(int(rng.integers(-2, 3)), 7), Fraction(int(rng.integers(-2, 3)), 7))
        if not a4 - a1 * t2:
            continue
        t1 = ex1_integrable_t1(a1, a4, a7, t2)
        if _modulus_squared(t1) >= Fraction(1, 4):
            continue
        return {
            "a1": a1, "a3": random_gaussian(rng), "a4": a4, "a7": a7,
            "a8": random_gaussian(rng), "t1": t1, "t2": t2,
        }


# Brute-force search


def search_ex2_instances(bound: int = 3, limit: int = 1, progress: bool = False) -> List[Dict[str, int]]:
    """
    Integer instances of the identified second family that are astheno-Kaehler with a nonzero obstruction.

    Searches b1, b3, b4, b2, b5, a2, a5 in [-bound, bound] for
    2 re(b5 conj(b2)) = 2 re(a5 conj(a2)) = conj(a2) b5 + conj(a5) b2 = |b1|^2 + |b3|^2 + |b4|^2
    with b1 b3 != 0 and |b3| != |b4|.

    Args:
        bound: Search range
        limit: Stop after this many hits
        progress: Show a tqdm bar

    Returns:
        List of name -> value mappings, in search order
    """
    names = ("b1", "b3", "b4", "b2", "b5", "a2", "a5")
    values = range(-bound, bound + 1)
    total = len(values) ** len(names)
    found: List[Dict[str, int]] = []
    candidates: Iterable = product(values, repeat=len(names))
    if progress:
        candidates = tqdm(candidates, total=total, desc="ex2 search")
    for b1, b3, b4, b2, b5, a2, a5 in candidates:
        if not b1 or not b3 or abs(b3) == abs(b4):
            continue
        s = b1 * b1 + b3 * b3 + b4 * b4
        if 2 * b5 * b2 == s and 2 * a5 * a2 == s and a2 * b5 + a5 * b2 == s:
            found.append(dict(zip(names, (b1, b3, b4, b2, b5, a2, a5))))
            logger.info(f"Search hit: {found[-1]}")
            if len(found) >= limit:
                break
    return found
