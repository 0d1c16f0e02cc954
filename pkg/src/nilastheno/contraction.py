"""
Contraction Module
Vector-valued (0,1)-forms, interior products, simultaneous contraction and the extension map
"""

import logging
from math import factorial
from typing import Dict, List, Optional, Tuple

from .errors import DimensionMismatch, ParseError
from .exterior import InvariantForm, Monomial, indices_of
from .scalars import ScalarDomain

logger = logging.getLogger(__name__)


class VectorForm01:
    """phi = sum_{j,k} phi^k_j conj(eta^j) (x) Z_k"""

    def __init__(self, n: int, domain, coeffs: Optional[Dict[Tuple[int, int], object]] = None):
        """
        Args:
            n: Complex dimension
            domain: Coefficient domain
            coeffs: (k, j) -> phi^k_j, the coefficient of conj(eta^j) (x) Z_k
        """
        self.n = n
        self.domain = domain
        self.coeffs: Dict[Tuple[int, int], object] = {}
        for (k, j), value in (coeffs or {}).items():
            if not (1 <= k <= n and 1 <= j <= n):
                raise DimensionMismatch(max(k, j), n)
            value = domain.convert(value)
            if value:
                self.coeffs[(k, j)] = value

    def entry(self, k: int, j: int):
        return self.coeffs.get((k, j), self.domain.zero)

    def matrix(self) -> List[List[object]]:
        """Phi[k-1][j-1] = phi^k_j."""
        return [[self.entry(k, j) for j in range(1, self.n + 1)] for k in range(1, self.n + 1)]

    def conjugate_matrix(self) -> List[List[object]]:
        return [[self.domain.conj(value) for value in row] for row in self.matrix()]

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, VectorForm01) and self.n == other.n and self.coeffs == other.coeffs

    __hash__ = None

    def map_coefficients(self, fn, domain=None) -> "VectorForm01":
        target = domain or self.domain
        return VectorForm01(self.n, target, {key: fn(value) for key, value in self.coeffs.items()})

    def scale(self, value) -> "VectorForm01":
        factor = self.domain.convert(value)
        return VectorForm01(self.n, self.domain, {key: c * factor for key, c in self.coeffs.items()})

    def __add__(self, other: "VectorForm01") -> "VectorForm01":
        if other.n != self.n:
            raise DimensionMismatch(self.n, other.n)
        keys = set(self.coeffs) | set(other.coeffs)
        return VectorForm01(self.n, self.domain, {key: self.entry(*key) + other.entry(*key) for key in keys})

    @classmethod
    def zero(cls, n: int, domain) -> "VectorForm01":
        return cls(n, domain)

    @classmethod
    def from_dict(cls, data: dict, n: int, domain: ScalarDomain) -> "VectorForm01":
        """
        Parse the `{"phi": {"k|j": "expr"}}` file syntax.

        Args:
            data: Either the whole file mapping or its "phi" entry
            n: Complex dimension
            domain: Session domain

        Returns:
            VectorForm01
        """
        entries = data.get("phi", data) if isinstance(data, dict) else data
        coeffs = {}
        for key, text in entries.items():
            parts = str(key).split("|")
            try:
                k, j = (int(part) for part in parts)
            except ValueError as e:
                raise ParseError(f"Vector form key '{key}' must look like 'k|j'") from e
            coeffs[(k, j)] = domain.parse(str(text))
        return cls(n, domain, coeffs)

    def to_dict(self) -> dict:
        return {
            "phi": {f"{k}|{j}": self.domain.format(value) for (k, j), value in sorted(self.coeffs.items())}
        }

    def __repr__(self):
        shown = ", ".join(f"{k}|{j}: {self.domain.format(v)}" for (k, j), v in sorted(self.coeffs.items()))
        return f"VectorForm01(n={self.n}, {{{shown}}})"


class CoframeOperator:
    """Linear map on covectors; row a is the image of theta^a over the theta basis."""

    def __init__(self, n: int, domain, rows: List[List[object]]):
        """
        Args:
            n: Complex dimension
            domain: Coefficient domain
            rows: 2n x 2n matrix; theta^1..theta^n = eta^1..eta^n, then conj(eta^1)..conj(eta^n)
        """
        if len(rows) != 2 * n or any(len(row) != 2 * n for row in rows):
            raise DimensionMismatch(len(rows), 2 * n)
        self.n = n
        self.domain = domain
        self.rows = [[domain.convert(value) for value in row] for row in rows]
        self._images: Dict[int, InvariantForm] = {}

    @classmethod
    def identity(cls, n: int, domain) -> "CoframeOperator":
        size = 2 * n
        return cls(n, domain, [[domain.one if a == b else domain.zero for b in range(size)] for a in range(size)])

    @classmethod
    def from_blocks(cls, n: int, domain, hh, ha, ah, aa) -> "CoframeOperator":
        """Assemble from the four n x n blocks (eta->eta, eta->conj eta, conj eta->eta, conj eta->conj eta)."""
        rows = [list(hh[i]) + list(ha[i]) for i in range(n)] + [list(ah[i]) + list(aa[i]) for i in range(n)]
        return cls(n, domain, rows)

    def __eq__(self, other):
        return isinstance(other, CoframeOperator) and self.n == other.n and self.rows == other.rows

    __hash__ = None

    def __add__(self, other: "CoframeOperator") -> "CoframeOperator":
        return CoframeOperator(
            self.n, self.domain, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        )

    def __sub__(self, other: "CoframeOperator") -> "CoframeOperator":
        return CoframeOperator(
            self.n, self.domain, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        )

    def compose(self, other: "CoframeOperator") -> "CoframeOperator":
        """self after other: theta -> other(theta) -> self applied to each covector."""
        size = 2 * self.n
        rows = []
        for a in range(size):
            row = []
            for c in range(size):
                total = self.domain.zero
                for b in range(size):
                    if other.rows[a][b] and self.rows[b][c]:
                        total = total + other.rows[a][b] * self.rows[b][c]
                row.append(total)
            rows.append(row)
        return CoframeOperator(self.n, self.domain, rows)

    def determinant(self):
        return self.domain.determinant(self.rows)

    def image(self, a: int) -> InvariantForm:
        """Image of theta^a (0-based) as a 1-form."""
        if a not in self._images:
            terms = {}
            for b, value in enumerate(self.rows[a]):
                if value:
                    mono = Monomial(1 << b, 0) if b < self.n else Monomial(0, 1 << (b - self.n))
                    terms[mono] = value
            self._images[a] = InvariantForm(self.n, self.domain, terms)
        return self._images[a]

    def images(self) -> List[InvariantForm]:
        return [self.image(a) for a in range(2 * self.n)]


# Operator constructors


def identity_plus(phi: VectorForm01) -> CoframeOperator:
    """I + phi + conj(phi): eta^k -> eta^k + sum_j phi^k_j conj(eta^j), and the conjugate rows."""
    n, domain = phi.n, phi.domain
    phi_matrix = phi.matrix()
    conj_matrix = phi.conjugate_matrix()
    identity = [[domain.one if i == j else domain.zero for j in range(n)] for i in range(n)]
    return CoframeOperator.from_blocks(n, domain, identity, phi_matrix, conj_matrix, identity)


def _matmul(domain, left, right):
    size = len(left)
    return [
        [sum((left[i][k] * right[k][j] for k in range(size)), domain.zero) for j in range(size)]
        for i in range(size)
    ]


def phi_phibar(phi: VectorForm01) -> CoframeOperator:
    """The operator conj(phi) contracted with phi: eta^k -> sum_l (Phi conj Phi)_kl eta^l, zero on conj(eta)."""
    n, domain = phi.n, phi.domain
    product = _matmul(domain, phi.matrix(), phi.conjugate_matrix())
    zeros = [[domain.zero] * n for _ in range(n)]
    return CoframeOperator.from_blocks(n, domain, product, zeros, zeros, zeros)


def phibar_phi(phi: VectorForm01) -> CoframeOperator:
    """conj(eta^k) -> sum_l (conj Phi Phi)_kl conj(eta^l), zero on eta."""
    n, domain = phi.n, phi.domain
    product = _matmul(domain, phi.conjugate_matrix(), phi.matrix())
    zeros = [[domain.zero] * n for _ in range(n)]
    return CoframeOperator.from_blocks(n, domain, zeros, zeros, zeros, product)


def operator_inverse(E: CoframeOperator) -> CoframeOperator:
    """
    Exact inverse over the coefficient field.

    Raises:
        SingularOperator: carrying the vanishing determinant
    """
    rows = E.domain.inverse_matrix(E.rows, "coframe change")
    return CoframeOperator(E.n, E.domain, rows)


# Contractions


def interior_product(k: int, alpha: InvariantForm, conjugate: bool = False) -> InvariantForm:
    """
    Contract with Z_k, or with conj(Z_k) when conjugate is set.

    Args:
        k: Index of the vector field
        alpha: Form to contract
        conjugate: Use conj(Z_k), which crosses the holomorphic block first

    Returns:
        Z_k -| alpha
    """
    if not 1 <= k <= alpha.n:
        raise DimensionMismatch(k, alpha.n)
    bit = 1 << (k - 1)
    terms = {}
    for mono, coeff in alpha.items():
        mask = mono.anti if conjugate else mono.holo
        if not mask & bit:
            continue
        position = (mask & (bit - 1)).bit_count()
        negative = position % 2 == 1
        if conjugate and mono.holo.bit_count() % 2:
            negative = not negative
        image = Monomial(mono.holo, mono.anti & ~bit) if conjugate else Monomial(mono.holo & ~bit, mono.anti)
        terms[image] = -coeff if negative else coeff
    return InvariantForm(alpha.n, alpha.domain, terms)


def _check_pair(phi: VectorForm01, alpha: InvariantForm):
    if phi.n != alpha.n:
        raise DimensionMismatch(phi.n, alpha.n)


def contract(phi: VectorForm01, alpha: InvariantForm) -> InvariantForm:
    """iota_phi alpha = sum phi^k_j conj(eta^j) ^ (Z_k -| alpha); (p,q) -> (p-1,q+1)."""
    _check_pair(phi, alpha)
    result = InvariantForm.zero(alpha.n, alpha.domain)
    for k in range(1, phi.n + 1):
        row = {j: value for (kk, j), value in phi.coeffs.items() if kk == k}
        if not row:
            continue
        inner = interior_product(k, alpha)
        if not inner:
            continue
        covector = InvariantForm(
            alpha.n, phi.domain, {Monomial(0, 1 << (j - 1)): value for j, value in row.items()}
        )
        result = result + covector.wedge(inner)
    return result


def contract_bar(phi: VectorForm01, alpha: InvariantForm) -> InvariantForm:
    """iota_{conj phi} alpha = sum conj(phi^k_j) eta^j ^ (conj(Z_k) -| alpha); (p,q) -> (p+1,q-1)."""
    _check_pair(phi, alpha)
    result = InvariantForm.zero(alpha.n, alpha.domain)
    for k in range(1, phi.n + 1):
        row = {j: phi.domain.conj(value) for (kk, j), value in phi.coeffs.items() if kk == k}
        if not row:
            continue
        inner = interior_product(k, alpha, conjugate=True)
        if not inner:
            continue
        covector = InvariantForm(
            alpha.n, phi.domain, {Monomial(1 << (j - 1), 0): value for j, value in row.items()}
        )
        result = result + covector.wedge(inner)
    return result


def simultaneous_contract(E: CoframeOperator, alpha: InvariantForm) -> InvariantForm:
    """Replace every covector factor by its E-image and expand multilinearly."""
    if E.n != alpha.n:
        raise DimensionMismatch(E.n, alpha.n)
    n = E.n
    result = InvariantForm.zero(n, E.domain)
    for mono, coeff in alpha.items():
        slots = [k - 1 for k in indices_of(mono.holo)] + [n + k - 1 for k in indices_of(mono.anti)]
        term = InvariantForm.scalar(n, E.domain, E.domain.one)
        for a in slots:
            term = term.wedge(E.image(a))
            if not term:
                break
        if term:
            result = result + term.scale(coeff)
    return result


def extension_map(phi: VectorForm01, alpha: InvariantForm) -> InvariantForm:
    """e^{iota_phi | iota_conj(phi)} alpha, realized as (I + phi + conj phi) applied slotwise."""
    _check_pair(phi, alpha)
    return simultaneous_contract(identity_plus(phi), alpha)


def contraction_derivation(phi: VectorForm01, alpha: InvariantForm) -> InvariantForm:
    """iota_phi + iota_conj(phi): the first-order part of the extension map."""
    return contract(phi, alpha) + contract_bar(phi, alpha)


def extension_series(phi: VectorForm01, alpha: InvariantForm) -> InvariantForm:
    """
    Finite exponential series for the extension map.

    On eta^I ^ conj(eta)^J this is (sum_r iota_phi^r / r!) eta^I wedged with
    (sum_r iota_conj(phi)^r / r!) conj(eta)^J, each sum terminating at r = |I| or |J|.
    """
    _check_pair(phi, alpha)
    n, domain = alpha.n, alpha.domain
    result = InvariantForm.zero(n, domain)
    for mono, coeff in alpha.items():
        holo_part = InvariantForm(n, domain, {Monomial(mono.holo, 0): domain.one})
        anti_part = InvariantForm(n, domain, {Monomial(0, mono.anti): domain.one})
        holo_sum = _exponential(lambda form: contract(phi, form), holo_part, mono.holo.bit_count())
        anti_sum = _exponential(lambda form: contract_bar(phi, form), anti_part, mono.anti.bit_count())
        result = result + holo_sum.wedge(anti_sum).scale(coeff)
    return result


def _exponential(operator, form: InvariantForm, order: int) -> InvariantForm:
    total = form
    power = form
    for r in range(1, order + 1):
        power = operator(power)
        if not power:
            break
        total = total + power / factorial(r)
    return total
