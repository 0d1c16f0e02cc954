"""
Bott-Chern Cohomology Module
Invariant Bott-Chern spaces, exactness certificates and harmonicity by exact linear algebra over Q(i)
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix
from tqdm import tqdm

from .algebra import INVARIANT_LEVEL, ComplexNilAlgebra, ddbar, exterior_derivative
from .errors import InvalidStructure, SymbolicRankRefused
from .exterior import InvariantForm, Monomial, basis_monomials
from .metrics import HermitianMetric, hodge_star

logger = logging.getLogger(__name__)

PIVOT_METHODS = ("GJ", "FF")

NOT_CLOSED = "NotClosed"
EXACT = "Exact"
NONZERO_CLASS = "NonzeroClass"


def _require_numeric(g: ComplexNilAlgebra, *forms: InvariantForm):
    if not g.is_numeric():
        raise SymbolicRankRefused(
            f"Bott-Chern ranks of {g.name or 'this algebra'} depend on parameters; specialize first"
        )
    for form in forms:
        for _, coeff in form.items():
            if not g.domain.is_constant(coeff):
                raise SymbolicRankRefused("Form coefficients depend on parameters; specialize first")


def algebra_fingerprint(g: ComplexNilAlgebra) -> str:
    payload = json.dumps(g.to_dict(), sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _column(g: ComplexNilAlgebra, form: InvariantForm, rows: Dict[Monomial, int]) -> List[object]:
    column = [QQ_I.zero] * len(rows)
    for mono, coeff in form.items():
        column[rows[mono]] = g.domain.to_gaussian(coeff)
    return column


def _matrix(columns: List[List[object]], height: int) -> DomainMatrix:
    """Matrix whose j-th column is columns[j]."""
    width = len(columns)
    rows = [[columns[j][i] for j in range(width)] for i in range(height)]
    return DomainMatrix(rows, (height, width), QQ_I)


def _rref(matrix: DomainMatrix, method: str) -> Tuple[List[List[object]], Tuple[int, ...]]:
    height, width = matrix.shape
    if not height or not width:
        return [[QQ_I.zero] * width for _ in range(height)], ()
    reduced, pivots = matrix.rref(method=method)
    return reduced.to_list(), tuple(pivots)


def _nullspace(matrix: DomainMatrix, method: str) -> List[List[object]]:
    """Basis of {x : M x = 0}, one vector per free column."""
    width = matrix.shape[1]
    reduced, pivots = _rref(matrix, method)
    basis = []
    for free in range(width):
        if free in pivots:
            continue
        vector = [QQ_I.zero] * width
        vector[free] = QQ_I.one
        for row, column in enumerate(pivots):
            vector[column] = -reduced[row][free]
        basis.append(vector)
    return basis


def differential_matrix(g: ComplexNilAlgebra, p: int, q: int) -> Tuple[DomainMatrix, List[Monomial]]:
    """d restricted to invariant (p,q)-forms; columns follow basis_monomials(n, p, q)."""
    source = basis_monomials(g.n, p, q)
    images = [exterior_derivative(g, InvariantForm(g.n, g.domain, {mono: g.domain.one})) for mono in source]
    targets = sorted({mono for image in images for mono, _ in image.items()}, key=Monomial.sort_key)
    rows = {mono: index for index, mono in enumerate(targets)}
    return _matrix([_column(g, image, rows) for image in images], len(targets)), source


def ddbar_matrix(g: ComplexNilAlgebra, p: int, q: int) -> DomainMatrix:
    """del delbar from invariant (p-1,q-1)-forms into the (p,q) basis."""
    target = basis_monomials(g.n, p, q)
    rows = {mono: index for index, mono in enumerate(target)}
    if p == 0 or q == 0:
        return _matrix([], len(target))
    source = basis_monomials(g.n, p - 1, q - 1)
    images = [ddbar(g, InvariantForm(g.n, g.domain, {mono: g.domain.one})) for mono in source]
    return _matrix([_column(g, image, rows) for image in images], len(target))


@dataclass
class CohomologySpace:
    """Invariant H_BC^{p,q} with representatives"""

    p: int
    q: int
    dimension: int
    basis: List[InvariantForm]
    fingerprint: str
    kernel_dimension: int = 0
    image_rank: int = 0
    level: str = INVARIANT_LEVEL

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "dimension": self.dimension,
            "kernel_dimension": self.kernel_dimension,
            "image_rank": self.image_rank,
            "representatives": [form.format() for form in self.basis],
            "fingerprint": self.fingerprint,
            "level": self.level,
        }


def bc_space(g: ComplexNilAlgebra, p: int, q: int, method: str = "GJ") -> CohomologySpace:
    """
    Invariant Bott-Chern space of bidegree (p,q).

    Args:
        g: Algebra with Gaussian-rational structure constants
        p: Holomorphic degree
        q: Anti-holomorphic degree
        method: Elimination strategy passed to the exact row reduction

    Returns:
        CohomologySpace; dimension = dim ker d - rank del delbar
    """
    if not (0 <= p <= g.n and 0 <= q <= g.n):
        raise InvalidStructure(f"Bidegree ({p},{q}) outside 0..{g.n}")
    if method not in PIVOT_METHODS:
        raise InvalidStructure(f"Unknown elimination method '{method}'")
    _require_numeric(g)
    d_matrix, source = differential_matrix(g, p, q)
    kernel = _nullspace(d_matrix, method)
    image = ddbar_matrix(g, p, q)
    _, image_pivots = _rref(image, method)
    image_rank = len(image_pivots)

    # Kernel vectors that stay pivots after the image block span a complement.
    image_columns = [list(column) for column in zip(*image.to_list())] if image.shape[1] else []
    combined = _matrix(image_columns + kernel, len(source))
    _, pivots = _rref(combined, method)
    offset = len(image_columns)
    representatives = []
    for column in pivots:
        if column >= offset:
            vector = kernel[column - offset]
            terms = {source[i]: g.domain.constant(value) for i, value in enumerate(vector) if value}
            representatives.append(InvariantForm(g.n, g.domain, terms))

    space = CohomologySpace(
        p=p,
        q=q,
        dimension=len(kernel) - image_rank,
        basis=representatives,
        fingerprint=algebra_fingerprint(g),
        kernel_dimension=len(kernel),
        image_rank=image_rank,
    )
    logger.debug(f"H_BC^({p},{q}) of {g.name or 'algebra'}: dim {space.dimension}")
    return space


def bc_table(g: ComplexNilAlgebra, method: str = "GJ", progress: bool = False) -> Dict[Tuple[int, int], int]:
    """Dimensions of every invariant H_BC^{p,q}."""
    pairs = [(p, q) for p in range(g.n + 1) for q in range(g.n + 1)]
    dims = {}
    for p, q in tqdm(pairs, desc="Bott-Chern", disable=not progress):
        dims[(p, q)] = bc_space(g, p, q, method).dimension
    return dims


@dataclass
class SolveResult:
    """Outcome of solving del delbar X = target"""

    solvable: bool
    witness: Optional[InvariantForm] = None
    certificate: Dict[Monomial, object] = field(default_factory=dict)


def solve_ddbar(g: ComplexNilAlgebra, target: InvariantForm, p: int, q: int, method: str = "GJ") -> SolveResult:
    """
    Solve del delbar X = target for an invariant (p-1,q-1)-form X.

    Returns:
        SolveResult with a witness, or with a functional on (p,q)-forms that kills
        the del delbar image and not the target
    """
    _require_numeric(g, target)
    if target and target.bidegree != (p, q):
        raise InvalidStructure(f"Target must be homogeneous of bidegree ({p},{q})")
    if not target:
        return SolveResult(True, InvariantForm.zero(g.n, g.domain))
    basis = basis_monomials(g.n, p, q)
    rows = {mono: index for index, mono in enumerate(basis)}
    image = ddbar_matrix(g, p, q)
    vector = _column(g, target, rows)
    image_columns = [list(column) for column in zip(*image.to_list())] if image.shape[1] else []
    augmented = _matrix(image_columns + [vector], len(basis))
    reduced, pivots = _rref(augmented, method)
    width = len(image_columns)

    if width not in pivots:
        coefficients = [QQ_I.zero] * width
        for row, column in enumerate(pivots):
            coefficients[column] = reduced[row][width]
        source = basis_monomials(g.n, p - 1, q - 1)
        witness = InvariantForm(
            g.n, g.domain, {source[i]: g.domain.constant(c) for i, c in enumerate(coefficients) if c}
        )
        if ddbar(g, witness) != target:
            raise ArithmeticError("del delbar witness failed re-substitution")
        return SolveResult(True, witness)

    # Left null vectors of the image matrix: functionals vanishing on im(del delbar).
    transpose = DomainMatrix(
        [list(column) for column in image_columns],
        (width, len(basis)),
        QQ_I,
    )
    functionals = _nullspace(transpose, method) if width else [
        [QQ_I.one if i == j else QQ_I.zero for j in range(len(basis))] for i in range(len(basis))
    ]
    for functional in functionals:
        pairing = sum((f * a for f, a in zip(functional, vector)), QQ_I.zero)
        if pairing:
            certificate = {basis[i]: g.domain.constant(f) for i, f in enumerate(functional) if f}
            return SolveResult(False, certificate=certificate)
    raise ArithmeticError("Inconsistent system without a separating functional")


@dataclass
class BCVerdict:
    """Bott-Chern class verdict for a single form"""

    status: str
    witness: Optional[InvariantForm] = None
    certificate: Dict[Monomial, object] = field(default_factory=dict)
    level: str = INVARIANT_LEVEL

    @property
    def vanishes(self) -> bool:
        return self.status == EXACT

    def to_dict(self, domain) -> dict:
        return {
            "status": self.status,
            "witness": self.witness.format() if self.witness is not None else None,
            "certificate": {mono.text(): domain.format(value) for mono, value in sorted(
                self.certificate.items(), key=lambda item: item[0].sort_key())},
            "level": self.level,
        }


def bc_class_vanishes(g: ComplexNilAlgebra, alpha: InvariantForm, method: str = "GJ") -> BCVerdict:
    """
    Decide whether [alpha] vanishes in invariant H_BC.

    Args:
        g: Numeric algebra
        alpha: Homogeneous (p,q)-form with constant coefficients

    Returns:
        BCVerdict: NotClosed, Exact with witness, or NonzeroClass with certificate
    """
    _require_numeric(g, alpha)
    if not alpha:
        return BCVerdict(EXACT, InvariantForm.zero(g.n, g.domain))
    bidegree = alpha.bidegree
    if bidegree is None:
        raise InvalidStructure("bc_class_vanishes needs a form of a single bidegree")
    if exterior_derivative(g, alpha):
        return BCVerdict(NOT_CLOSED)
    result = solve_ddbar(g, alpha, *bidegree, method=method)
    if result.solvable:
        return BCVerdict(EXACT, result.witness)
    return BCVerdict(NONZERO_CLASS, certificate=result.certificate)


def harmonicity_residuals(g: ComplexNilAlgebra, m: HermitianMetric, alpha: InvariantForm) -> Tuple[InvariantForm, InvariantForm]:
    """(d alpha, del delbar * alpha); both vanish iff alpha is Bott-Chern harmonic."""
    return exterior_derivative(g, alpha), ddbar(g, hodge_star(m, alpha))


def harmonicity_conditions(g: ComplexNilAlgebra, m: HermitianMetric, alpha: InvariantForm) -> List[object]:
    closed, coclosed = harmonicity_residuals(g, m, alpha)
    return [c for _, c in closed.sorted_items()] + [c for _, c in coclosed.sorted_items()]


def is_bc_harmonic(g: ComplexNilAlgebra, m: HermitianMetric, alpha: InvariantForm) -> bool:
    """
    Check d alpha = 0 and del delbar * alpha = 0.

    Symbolic algebras are accepted: the answer is then whether both vanish identically.
    """
    closed, coclosed = harmonicity_residuals(g, m, alpha)
    return not closed and not coclosed

