"""
Hermitian Metrics Module
Fundamental forms, special-metric residuals and the antilinear Hodge star for the unit diagonal metric
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from .algebra import ComplexNilAlgebra, ddbar, exterior_derivative
from .errors import InvalidStructure, NonDiagonalMetric, ParseError
from .exterior import InvariantForm, Monomial, merge_sign
from .scalars import ScalarDomain, gaussian

logger = logging.getLogger(__name__)

MODES = ("astheno", "skt", "balanced", "kahler")


class HermitianMetric:
    """Invariant Hermitian metric with fundamental form (i/2) sum F_jk eta^j ^ conj(eta^k)"""

    def __init__(self, n: int, domain: ScalarDomain, F: Optional[Sequence[Sequence[object]]] = None):
        """
        Args:
            n: Complex dimension
            domain: Scalar domain of the entries
            F: n x n Hermitian matrix; the identity when omitted
        """
        self.n = n
        self.domain = domain
        if F is None:
            F = [[1 if j == k else 0 for k in range(n)] for j in range(n)]
        if len(F) != n or any(len(row) != n for row in F):
            raise InvalidStructure(f"Metric matrix must be {n} x {n}")
        self.F = [[domain.convert(value) for value in row] for row in F]
        for j in range(n):
            for k in range(n):
                if self.F[k][j] != domain.conj(self.F[j][k]):
                    raise InvalidStructure(f"Metric matrix is not Hermitian at ({j + 1},{k + 1})")
        self.diagonal = all(not self.F[j][k] for j in range(n) for k in range(n) if j != k)
        self._powers: Dict[int, InvariantForm] = {}

    @classmethod
    def unit_diagonal(cls, n: int, domain: ScalarDomain) -> "HermitianMetric":
        return cls(n, domain)

    @property
    def is_unit_diagonal(self) -> bool:
        return self.diagonal and all(self.F[j][j] == self.domain.one for j in range(self.n))

    def fundamental_form(self) -> InvariantForm:
        half_i = self.domain.imag_unit / 2
        terms = {}
        for j in range(self.n):
            for k in range(self.n):
                if self.F[j][k]:
                    terms[Monomial(1 << j, 1 << k)] = half_i * self.F[j][k]
        return InvariantForm(self.n, self.domain, terms)

    def is_positive_at(self, assignment: Dict[str, object]) -> bool:
        """Leading principal minors positive at a numeric point."""
        values = [[self.domain.specialize(value, assignment) for value in row] for row in self.F]
        for size in range(1, self.n + 1):
            minor = DomainMatrix([row[:size] for row in values[:size]], (size, size), QQ_I).det()
            if minor.y or minor.x <= 0:
                return False
        return True

    @classmethod
    def from_dict(cls, data: dict, n: int, domain: ScalarDomain) -> "HermitianMetric":
        """
        Parse `{"metric": "diagonal"}` or `{"F": {"j|k": "expr"}}`.

        Entries missing below the diagonal are filled in by conjugation.
        """
        if data.get("metric", "") == "diagonal" and "F" not in data:
            return cls(n, domain)
        entries = data.get("F")
        if not isinstance(entries, dict):
            raise ParseError("Metric file needs \"metric\": \"diagonal\" or an \"F\" mapping")
        F = [[None] * n for _ in range(n)]
        for key, text in entries.items():
            try:
                j, k = (int(part) for part in str(key).split("|"))
            except ValueError as e:
                raise ParseError(f"Metric key '{key}' must look like 'j|k'") from e
            if not (1 <= j <= n and 1 <= k <= n):
                raise InvalidStructure(f"Metric key '{key}' outside 1..{n}")
            F[j - 1][k - 1] = domain.parse(str(text))
        for j in range(n):
            for k in range(n):
                if F[j][k] is None:
                    F[j][k] = domain.conj(F[k][j]) if F[k][j] is not None else domain.zero
        return cls(n, domain, F)

    def to_dict(self) -> dict:
        if self.is_unit_diagonal:
            return {"metric": "diagonal"}
        return {
            "F": {
                f"{j + 1}|{k + 1}": self.domain.format(self.F[j][k])
                for j in range(self.n)
                for k in range(self.n)
                if self.F[j][k]
            }
        }


def fundamental_power(m: HermitianMetric, k: int) -> InvariantForm:
    """Exact k-fold wedge of the fundamental form; omega^0 = 1."""
    if not 0 <= k <= m.n:
        raise InvalidStructure(f"Power {k} outside 0..{m.n}")
    if k not in m._powers:
        power = InvariantForm.scalar(m.n, m.domain, 1)
        omega = m.fundamental_form()
        for _ in range(k):
            power = power.wedge(omega)
        m._powers[k] = power
    return m._powers[k]


def normalized_power(m: HermitianMetric, k: int) -> InvariantForm:
    """omega^k / (k! (i/2)^k); for the unit diagonal metric the sum of eta^{j|j} ^ ... over j_1 < ... < j_k."""
    scale = m.domain.convert(factorial(k)) * (m.domain.imag_unit / 2) ** k
    return fundamental_power(m, k) / scale


@dataclass
class SpecialMetricResult:
    """Residual form of a special-metric mode and its coefficient conditions"""

    mode: str
    residual: InvariantForm
    conditions: List[object] = field(default_factory=list)
    independent: List[object] = field(default_factory=list)

    @property
    def satisfied(self) -> bool:
        return not self.residual

    def to_dict(self, domain: ScalarDomain) -> dict:
        return {
            "mode": self.mode,
            "residual": self.residual.format(),
            "satisfied": self.satisfied,
            "conditions": [domain.format(c) for c in self.conditions],
            "independent_conditions": [domain.format(c) for c in self.independent],
        }


def special_metric_residual(g: ComplexNilAlgebra, m: HermitianMetric, mode: str) -> InvariantForm:
    n = m.n
    if mode == "astheno":
        if n < 2:
            raise InvalidStructure("The astheno-Kaehler condition needs n >= 2")
        return ddbar(g, fundamental_power(m, n - 2))
    if mode == "skt":
        return ddbar(g, fundamental_power(m, 1))
    if mode == "balanced":
        return exterior_derivative(g, fundamental_power(m, n - 1))
    if mode == "kahler":
        return exterior_derivative(g, fundamental_power(m, 1))
    raise InvalidStructure(f"Unknown metric mode '{mode}', expected one of {', '.join(MODES)}")


def check_special_metric(g: ComplexNilAlgebra, m: HermitianMetric, mode: str) -> SpecialMetricResult:
    """
    Residual of a special-metric mode with its monomial coefficients.

    Args:
        g: Algebra
        m: Metric over g's dimension
        mode: astheno, skt, balanced or kahler

    Returns:
        SpecialMetricResult; conditions follow the deterministic monomial order
    """
    if m.n != g.n:
        raise InvalidStructure(f"Metric dimension {m.n} differs from algebra dimension {g.n}")
    residual = special_metric_residual(g, m, mode)
    conditions = [coeff for _, coeff in residual.sorted_items()]
    result = SpecialMetricResult(mode, residual, conditions, independent_conditions(g.domain, conditions))
    logger.info(f"{mode} check on {g.name or 'algebra'}: {len(result.independent)} independent condition(s)")
    return result


def independent_conditions(domain: ScalarDomain, conditions: List[object]) -> List[object]:
    """Normalized conditions, identifying constant multiples and conjugates."""
    found: List[object] = []
    for condition in conditions:
        normalized = domain.normalize_condition(condition)
        if not normalized:
            continue
        conjugate = domain.normalize_condition(domain.conj(normalized))
        if normalized in found or conjugate in found:
            continue
        found.append(normalized)
    return found


def express_in_span(domain: ScalarDomain, target, generators: List[object]) -> Optional[List[object]]:
    """
    Constant Q(i) coefficients c with target = sum c_i generators_i, or None.

    All inputs must have parameter-free denominators.
    """
    polys = [target] + list(generators)
    for s in polys:
        if not s.denom.is_ground:
            raise InvalidStructure("express_in_span needs polynomial inputs")
    vectors = []
    monomials = set()
    for s in polys:
        scale = QQ_I.convert(s.denom.LC)
        vector = {monom: QQ_I.convert(coeff) / scale for monom, coeff in s.numer.terms()}
        monomials.update(vector)
        vectors.append(vector)
    order = sorted(monomials)
    if not generators:
        return [] if not target else None
    # Columns are generators; augmented column is the target.
    rows = [[vectors[i + 1].get(monom, QQ_I.zero) for i in range(len(generators))] + [vectors[0].get(monom, QQ_I.zero)]
            for monom in order]
    if not rows:
        return [QQ_I.zero] * len(generators)
    matrix = DomainMatrix(rows, (len(rows), len(generators) + 1), QQ_I)
    reduced, pivots = matrix.rref()
    if len(generators) in pivots:
        return None
    solution = [QQ_I.zero] * len(generators)
    reduced_rows = reduced.to_list()
    for row, column in enumerate(pivots):
        solution[column] = reduced_rows[row][-1]
    return [domain.constant(value) for value in solution]


def forced_vanishing(domain: ScalarDomain, condition) -> Optional[List[str]]:
    """
    Parameters forced to zero when a condition is a definite sum of squared moduli.

    Returns:
        Names x with the condition equal to a positive multiple of sum |x|^2, else None
    """
    numerator = domain.normalize_condition(condition).numer
    if not numerator:
        return []
    names = []
    sign = None
    for monom, coeff in numerator.terms():
        coeff = QQ_I.convert(coeff)
        if coeff.y:
            return None
        positions = [p for p, e in enumerate(monom) if e]
        if len(positions) != 2 or any(monom[p] != 1 for p in positions):
            return None
        left, right = positions
        name = None
        for candidate in domain.params:
            if {left, right} == set(domain.generator_positions(candidate)):
                name = candidate
        if name is None:
            return None
        current = coeff.x > 0
        if sign is None:
            sign = current
        elif sign != current:
            return None
        names.append(name)
    return names


# Hodge star


def star_normalization(n: int, p: int, q: int):
    """kappa(p,q) = 2^(p+q-n)."""
    return gaussian(Fraction(2) ** (p + q - n))


def star_sign_exponent(n: int, p: int, q: int) -> int:
    """** = (-1)^(p(n-p) + q(n-q)) on bidegree (p,q)."""
    return p * (n - p) + q * (n - q)


def hodge_star(m: HermitianMetric, alpha: InvariantForm) -> InvariantForm:
    """
    Antilinear star for the unit diagonal metric.

    On monomials: *(c eta^{I|J}) = conj(c) sgn(I,I^c) sgn(J,J^c) 2^(p+q-n) eta^{I^c|J^c}.
    """
    if not m.is_unit_diagonal:
        raise NonDiagonalMetric("hodge_star needs the unit diagonal metric")
    n = alpha.n
    full = (1 << n) - 1
    terms = {}
    for mono, coeff in alpha.items():
        p, q = mono.bidegree
        holo_c, anti_c = full & ~mono.holo, full & ~mono.anti
        sign = merge_sign(mono.holo, holo_c) * merge_sign(mono.anti, anti_c)
        value = alpha.domain.conj(coeff) * alpha.domain.convert(star_normalization(n, p, q))
        terms[Monomial(holo_c, anti_c)] = -value if sign < 0 else value
    return InvariantForm(n, alpha.domain, terms)


def star_table(max_n: int = 6) -> List[Tuple[int, int, int, object, int]]:
    """(n, p, q, kappa, sign exponent of **) for every bidegree up to max_n."""
    return [
        (n, p, q, star_normalization(n, p, q), star_sign_exponent(n, p, q) % 2)
        for n in range(1, max_n + 1)
        for p, q in product(range(n + 1), repeat=2)
    ]
