"""
Structure Equations Module
Complex nilpotent Lie algebras given by d(eta^j), the operators d, del and delbar, validation and classification
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from .errors import DimensionMismatch, InvalidStructure, ParseError
from .exterior import InvariantForm, Monomial, indices_of, parse_form
from .scalars import ScalarDomain

logger = logging.getLogger(__name__)

INVARIANT_LEVEL = "invariant-level"


class ComplexNilAlgebra:
    """Structure equations d(eta^j) of an invariant complex structure"""

    def __init__(
        self,
        n: int,
        domain: ScalarDomain,
        dtable: Optional[Dict[int, InvariantForm]] = None,
        constants_only: bool = False,
        name: str = "",
    ):
        """
        Args:
            n: Complex dimension
            domain: Scalar domain holding the structure constants
            dtable: j -> d(eta^j); omitted entries are closed
            constants_only: Require every structure constant to lie in Q(i)
            name: Label used in reports
        """
        if n < 1:
            raise InvalidStructure(f"Dimension must be positive, got {n}")
        self.n = n
        self.domain = domain
        self.constants_only = constants_only
        self.name = name
        self.verified = False
        self.dtable: Dict[int, InvariantForm] = {}
        for j, form in sorted((dtable or {}).items()):
            if not 1 <= j <= n:
                raise InvalidStructure(f"d(eta^{j}) given but n = {n}")
            if form.n != n:
                raise DimensionMismatch(form.n, n)
            self._check_type(j, form)
            if form:
                self.dtable[j] = form
        if constants_only:
            for j, form in self.dtable.items():
                for mono, coeff in form.items():
                    if not domain.is_constant(coeff):
                        raise InvalidStructure(
                            f"Constants-only mode requires constants in Q(i); d(eta^{j}) has {domain.format(coeff)}"
                        )
        self._covector_cache: Dict[Tuple[str, int], InvariantForm] = {}
        self._monomial_cache: Dict[Monomial, InvariantForm] = {}

    @staticmethod
    def _check_type(j: int, form: InvariantForm):
        for bidegree in form.bidegrees():
            if bidegree == (0, 2):
                raise InvalidStructure(f"d(eta^{j}) has a (0,2) part; the complex structure would not be integrable")
            if bidegree not in ((2, 0), (1, 1)):
                raise InvalidStructure(f"d(eta^{j}) must be a 2-form of type (2,0)+(1,1), found {bidegree}")

    def __repr__(self):
        return f"ComplexNilAlgebra(n={self.n}, name={self.name!r})"

    # Structure constants

    def d_holo(self, j: int) -> InvariantForm:
        return self.dtable.get(j, InvariantForm.zero(self.n, self.domain))

    def A(self, j: int) -> Dict[Tuple[int, int], object]:
        """Holomorphic structure constants: (i,k) with i<k -> coefficient of eta^{ik}."""
        return {
            indices_of(mono.holo): coeff
            for mono, coeff in self.d_holo(j).items()
            if mono.bidegree == (2, 0)
        }

    def B(self, j: int) -> Dict[Tuple[int, int], object]:
        """Mixed structure constants: (i,k) -> coefficient of eta^i ^ conj(eta^k)."""
        return {
            indices_of(mono.holo) + indices_of(mono.anti): coeff
            for mono, coeff in self.d_holo(j).items()
            if mono.bidegree == (1, 1)
        }

    def constants(self) -> List[object]:
        return [coeff for j in sorted(self.dtable) for _, coeff in self.dtable[j].sorted_items()]

    def is_numeric(self) -> bool:
        return all(self.domain.is_constant(c) for c in self.constants())

    # Covector differentials

    def covector_differential(self, kind: str, k: int) -> InvariantForm:
        """d(eta^k) for kind 'h', d(conj eta^k) for kind 'a'."""
        key = (kind, k)
        if key not in self._covector_cache:
            form = self.d_holo(k)
            self._covector_cache[key] = form if kind == "h" else form.conjugate()
        return self._covector_cache[key]

    def monomial_differential(self, mono: Monomial) -> InvariantForm:
        """Leibniz expansion over the factors of a canonical monomial."""
        if mono in self._monomial_cache:
            return self._monomial_cache[mono]
        n, domain = self.n, self.domain
        factors = [("h", k) for k in indices_of(mono.holo)] + [("a", k) for k in indices_of(mono.anti)]
        covectors = [
            InvariantForm.holo(n, domain, k) if kind == "h" else InvariantForm.anti(n, domain, k)
            for kind, k in factors
        ]
        total = InvariantForm.zero(n, domain)
        for r, (kind, k) in enumerate(factors):
            differential = self.covector_differential(kind, k)
            if not differential:
                continue
            term = InvariantForm.scalar(n, domain, -1 if r % 2 else 1)
            for covector in covectors[:r]:
                term = term.wedge(covector)
            term = term.wedge(differential)
            for covector in covectors[r + 1:]:
                term = term.wedge(covector)
            total = total + term
        self._monomial_cache[mono] = total
        return total

    # Transformations

    def substitute(self, assignment: Dict[str, object], name: str = "") -> "ComplexNilAlgebra":
        """Specialize some or all parameters in the structure constants."""
        dtable = {
            j: form.map_coefficients(lambda c: self.domain.substitute(c, assignment))
            for j, form in self.dtable.items()
        }
        return ComplexNilAlgebra(self.n, self.domain, dtable, self.constants_only, name or self.name)

    def with_domain(self, domain: ScalarDomain) -> "ComplexNilAlgebra":
        dtable = {j: form.map_coefficients(domain.transfer, domain) for j, form in self.dtable.items()}
        return ComplexNilAlgebra(self.n, domain, dtable, self.constants_only, self.name)

    def same_structure(self, other: "ComplexNilAlgebra") -> bool:
        return self.n == other.n and all(self.d_holo(j) == other.d_holo(j) for j in range(1, self.n + 1))

    # Serialization

    @classmethod
    def from_dict(cls, data: dict, domain: Optional[ScalarDomain] = None, name: str = "") -> "ComplexNilAlgebra":
        """
        Build an algebra from its file representation

        Args:
            data: Mapping with keys n, params, real_params, d, constants_only
            domain: Session domain; built from the declared parameters when omitted
            name: Label for reports

        Returns:
            ComplexNilAlgebra
        """
        if "n" not in data:
            raise ParseError("Algebra file must declare 'n'")
        try:
            n = int(data["n"])
        except (TypeError, ValueError) as e:
            raise ParseError(f"Dimension '{data['n']}' is not an integer") from e
        if domain is None:
            domain = ScalarDomain(data.get("params", []), data.get("real_params", []))
        dtable = {}
        for key, text in (data.get("d") or {}).items():
            try:
                j = int(key)
            except ValueError as e:
                raise ParseError(f"Key '{key}' of 'd' is not an index") from e
            dtable[j] = parse_form(str(text), n, domain)
        return cls(n, domain, dtable, bool(data.get("constants_only", False)), name or data.get("name", ""))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "params": list(self.domain.params),
            "real_params": [p for p in self.domain.real_params],
            "d": {str(j): self.dtable[j].format() for j in sorted(self.dtable)},
            "constants_only": self.constants_only,
        }


# Operators


def _check_dimension(g: ComplexNilAlgebra, alpha: InvariantForm):
    if alpha.n != g.n:
        raise DimensionMismatch(alpha.n, g.n)


def exterior_derivative(g: ComplexNilAlgebra, alpha: InvariantForm) -> InvariantForm:
    """
    Apply d as the antiderivation extending the structure equations.

    Args:
        g: Algebra
        alpha: Form over g's dimension; coefficients may be scalars or jets

    Returns:
        d(alpha)
    """
    _check_dimension(g, alpha)
    terms: Dict[Monomial, object] = {}
    for mono, coeff in alpha.items():
        for image, value in g.monomial_differential(mono).items():
            contribution = coeff * value
            terms[image] = terms[image] + contribution if image in terms else contribution
    return InvariantForm(alpha.n, alpha.domain, terms)


def del_(g: ComplexNilAlgebra, alpha: InvariantForm) -> InvariantForm:
    """The (1,0) part of d, taken bidegree by bidegree."""
    result = InvariantForm.zero(alpha.n, alpha.domain)
    for p, q in alpha.bidegrees():
        result = result + exterior_derivative(g, alpha.project(p, q)).project(p + 1, q)
    return result


def delbar(g: ComplexNilAlgebra, alpha: InvariantForm) -> InvariantForm:
    """The (0,1) part of d, taken bidegree by bidegree."""
    result = InvariantForm.zero(alpha.n, alpha.domain)
    for p, q in alpha.bidegrees():
        result = result + exterior_derivative(g, alpha.project(p, q)).project(p, q + 1)
    return result


def ddbar(g: ComplexNilAlgebra, alpha: InvariantForm) -> InvariantForm:
    return del_(g, delbar(g, alpha))


# Validation


@dataclass
class ValidationReport:
    """Outcome of validate_algebra; failures are entries, never exceptions."""

    d_squared_zero: bool
    d_squared_failures: Dict[int, InvariantForm] = field(default_factory=dict)
    nilpotent: Optional[bool] = None
    nilpotency_method: str = "undetermined"
    constants_only_ok: Optional[bool] = None
    level: str = INVARIANT_LEVEL

    @property
    def ok(self) -> bool:
        return self.d_squared_zero and self.nilpotent is not False and self.constants_only_ok is not False

    def to_dict(self) -> dict:
        return {
            "d_squared_zero": self.d_squared_zero,
            "d_squared_failures": {str(j): form.format() for j, form in sorted(self.d_squared_failures.items())},
            "nilpotent": self.nilpotent,
            "nilpotency_method": self.nilpotency_method,
            "constants_only_ok": self.constants_only_ok,
            "level": self.level,
        }


def is_triangular(g: ComplexNilAlgebra) -> bool:
    """Every term of d(eta^j) uses only indices smaller than j."""
    for j, form in g.dtable.items():
        for mono, _ in form.items():
            if any(k >= j for k in indices_of(mono.holo | mono.anti)):
                return False
    return True


def _bracket_matrices(g: ComplexNilAlgebra) -> List[List[List[object]]]:
    """
    Real-basis-free bracket table on g_C = span(Z_1..Z_n, conj Z_1..conj Z_n).

    With d(theta^c) = sum_{a<b} D^c_ab theta^a ^ theta^b the bracket is
    [e_a, e_b] = -sum_c D^c_ab e_c. Returns table[a][b] as a coefficient vector.
    """
    n = g.n
    size = 2 * n
    table = [[[QQ_I.zero] * size for _ in range(size)] for _ in range(size)]
    for c in range(size):
        kind, k = ("h", c + 1) if c < n else ("a", c - n + 1)
        for mono, coeff in g.covector_differential(kind, k).items():
            slots = [i - 1 for i in indices_of(mono.holo)] + [n + i - 1 for i in indices_of(mono.anti)]
            a, b = slots
            value = g.domain.to_gaussian(coeff)
            table[a][b][c] = table[a][b][c] - value
            table[b][a][c] = table[b][a][c] + value
    return table


def _row_basis(rows: List[List[object]], size: int) -> List[List[object]]:
    if not rows:
        return []
    matrix = DomainMatrix(rows, (len(rows), size), QQ_I)
    reduced, pivots = matrix.rref()
    return reduced.to_list()[: len(pivots)]


def descending_series_dimensions(g: ComplexNilAlgebra) -> List[int]:
    """Dimensions of g, [g,g], [g,[g,g]], ... until the series stabilizes; numeric g only."""
    size = 2 * g.n
    table = _bracket_matrices(g)
    current = [[QQ_I.one if i == j else QQ_I.zero for j in range(size)] for i in range(size)]
    dimensions = [size]
    while current:
        images = []
        for a in range(size):
            for vector in current:
                image = [QQ_I.zero] * size
                for b, weight in enumerate(vector):
                    if weight:
                        for c in range(size):
                            if table[a][b][c]:
                                image[c] = image[c] + weight * table[a][b][c]
                if any(image):
                    images.append(image)
        following = _row_basis(images, size)
        if len(following) == len(current):
            dimensions.append(len(following))
            break
        current = following
        dimensions.append(len(current))
    return dimensions


def validate_algebra(g: ComplexNilAlgebra, point: Optional[Dict[str, object]] = None) -> ValidationReport:
    """
    Check d^2 = 0, nilpotency and the constants-only constraint.

    Args:
        g: Algebra to validate
        point: Optional numeric specialization used for the exact nilpotency check

    Returns:
        ValidationReport
    """
    failures = {}
    for j in range(1, g.n + 1):
        residual = exterior_derivative(g, g.d_holo(j))
        if residual:
            failures[j] = residual
    report = ValidationReport(d_squared_zero=not failures, d_squared_failures=failures)

    if is_triangular(g):
        report.nilpotent, report.nilpotency_method = True, "triangular"
    else:
        numeric = g.substitute(point) if point else g
        if numeric.is_numeric():
            dimensions = descending_series_dimensions(numeric)
            report.nilpotent = dimensions[-1] == 0
            report.nilpotency_method = "descending-series"
            logger.debug(f"Descending series dimensions for {g.name or 'algebra'}: {dimensions}")

    if g.constants_only:
        report.constants_only_ok = g.is_numeric()
    g.verified = report.ok
    if failures:
        logger.warning(f"d^2 != 0 on eta^{sorted(failures)} for {g.name or 'algebra'}")
    return report


# Classification


@dataclass
class Classification:
    """Structural flags of the complex structure"""

    abelian: bool
    holomorphically_parallelizable: bool
    nilpotent_coframe: bool
    complex_torus: bool
    abelian_conditions: List[object] = field(default_factory=list)
    parallelizable_conditions: List[object] = field(default_factory=list)

    def to_dict(self, domain: ScalarDomain) -> dict:
        return {
            "abelian": self.abelian,
            "holomorphically_parallelizable": self.holomorphically_parallelizable,
            "nilpotent_coframe": self.nilpotent_coframe,
            "complex_torus": self.complex_torus,
            "abelian_conditions": [domain.format(c) for c in self.abelian_conditions],
            "parallelizable_conditions": [domain.format(c) for c in self.parallelizable_conditions],
        }


def classify(g: ComplexNilAlgebra) -> Classification:
    """
    Abelian, holomorphically parallelizable, nilpotent coframe and torus flags.

    The *_conditions lists hold the constants whose simultaneous vanishing
    makes the corresponding flag true on a symbolic family.
    """
    holomorphic = [c for j in sorted(g.dtable) for _, c in sorted(g.A(j).items())]
    mixed = [c for j in sorted(g.dtable) for _, c in sorted(g.B(j).items())]
    return Classification(
        abelian=not holomorphic,
        holomorphically_parallelizable=not mixed,
        nilpotent_coframe=is_triangular(g),
        complex_torus=not g.dtable,
        abelian_conditions=holomorphic,
        parallelizable_conditions=mixed,
    )
