"""
Exterior Algebra Module
Bigraded invariant forms on the coframe {eta^j, conj(eta^j)} with canonical sign bookkeeping
"""

import logging
import re
from itertools import combinations
from typing import Callable, Dict, Iterable, Iterator, List, NamedTuple, Optional, Tuple

from .errors import DimensionMismatch, ParseError
from .scalars import ExpressionParser

logger = logging.getLogger(__name__)

_MONOMIAL_BODY = re.compile(r"^e\[\s*([0-9,\s]*)\|\s*([0-9,\s]*)\]$")


def mask_of(indices: Iterable[int]) -> int:
    """Bitmask with bit k-1 set for every index k."""
    mask = 0
    for k in indices:
        mask |= 1 << (k - 1)
    return mask


def indices_of(mask: int) -> Tuple[int, ...]:
    out = []
    k = 1
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return tuple(out)


def merge_sign(left: int, right: int) -> int:
    """
    Sign of sorting the concatenation of two ascending index sets.

    Args:
        left: Bitmask of the first block
        right: Bitmask of the second block

    Returns:
        +1 or -1, or 0 when the blocks share an index
    """
    if left & right:
        return 0
    inversions = 0
    rest = right
    while rest:
        low = rest & -rest
        inversions += (left & ~((low << 1) - 1)).bit_count()
        rest ^= low
    return -1 if inversions & 1 else 1


class Monomial(NamedTuple):
    """Canonical monomial eta^{holo} ^ conj(eta)^{anti}, index sets as bitmasks."""

    holo: int
    anti: int

    @property
    def bidegree(self) -> Tuple[int, int]:
        return self.holo.bit_count(), self.anti.bit_count()

    @property
    def degree(self) -> int:
        return self.holo.bit_count() + self.anti.bit_count()

    def sort_key(self):
        return indices_of(self.holo), indices_of(self.anti)

    def text(self) -> str:
        holo = ",".join(str(k) for k in indices_of(self.holo))
        anti = ",".join(str(k) for k in indices_of(self.anti))
        return f"e[{holo}|{anti}]"

    def product(self, other: "Monomial") -> Tuple[int, "Monomial"]:
        """Wedge of two canonical monomials as (sign, monomial); sign 0 on repeats."""
        if self.holo & other.holo or self.anti & other.anti:
            return 0, self
        sign = -1 if (self.anti.bit_count() * other.holo.bit_count()) & 1 else 1
        sign *= merge_sign(self.holo, other.holo) * merge_sign(self.anti, other.anti)
        return sign, Monomial(self.holo | other.holo, self.anti | other.anti)

    def conjugate(self) -> Tuple[int, "Monomial"]:
        p, q = self.bidegree
        return (-1 if (p * q) & 1 else 1), Monomial(self.anti, self.holo)


UNIT = Monomial(0, 0)


class InvariantForm:
    """Sparse element of the invariant exterior algebra with parametric coefficients."""

    __slots__ = ("n", "domain", "_terms")

    def __init__(self, n: int, domain, terms: Optional[Dict[Monomial, object]] = None):
        """
        Args:
            n: Complex dimension
            domain: Coefficient domain (ScalarDomain or JetDomain)
            terms: Monomial -> coefficient; zero coefficients are dropped
        """
        self.n = n
        self.domain = domain
        full = (1 << n) - 1
        clean = {}
        for mono, coeff in (terms or {}).items():
            if (mono.holo | mono.anti) & ~full:
                raise DimensionMismatch(max(indices_of(mono.holo | mono.anti)), n)
            if coeff:
                clean[mono] = coeff
        self._terms = clean

    # Constructors

    @classmethod
    def zero(cls, n: int, domain) -> "InvariantForm":
        return cls(n, domain)

    @classmethod
    def scalar(cls, n: int, domain, value) -> "InvariantForm":
        return cls(n, domain, {UNIT: domain.convert(value)})

    @classmethod
    def holo(cls, n: int, domain, k: int) -> "InvariantForm":
        """The covector eta^k."""
        _check_index(k, n)
        return cls(n, domain, {Monomial(1 << (k - 1), 0): domain.one})

    @classmethod
    def anti(cls, n: int, domain, k: int) -> "InvariantForm":
        """The covector conj(eta^k)."""
        _check_index(k, n)
        return cls(n, domain, {Monomial(0, 1 << (k - 1)): domain.one})

    @classmethod
    def monomial(cls, n: int, domain, holo: Iterable[int] = (), anti: Iterable[int] = (), coeff=None) -> "InvariantForm":
        """
        Build eta^{i_1}^...^eta^{i_p}^conj(eta)^{j_1}^... in the given factor order.

        Unsorted or repeated indices are allowed; the permutation sign is applied
        and repeats give zero.
        """
        form = cls.scalar(n, domain, domain.one if coeff is None else coeff)
        for k in holo:
            form = form.wedge(cls.holo(n, domain, k))
        for k in anti:
            form = form.wedge(cls.anti(n, domain, k))
        return form

    # Container protocol

    @property
    def terms(self) -> Dict[Monomial, object]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Monomial, object]]:
        return iter(self._terms.items())

    def sorted_items(self) -> List[Tuple[Monomial, object]]:
        return sorted(self._terms.items(), key=lambda item: item[0].sort_key())

    def coefficient(self, mono: Monomial):
        return self._terms.get(mono, self.domain.zero)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, InvariantForm):
            left, right = _unify(self, other)
            return left.n == right.n and left._terms == right._terms
        if not self._terms:
            return other == 0
        return NotImplemented

    __hash__ = None

    def bidegrees(self) -> List[Tuple[int, int]]:
        return sorted({mono.bidegree for mono in self._terms})

    @property
    def bidegree(self) -> Optional[Tuple[int, int]]:
        """The common bidegree of all terms, or None when empty or inhomogeneous."""
        found = self.bidegrees()
        return found[0] if len(found) == 1 else None

    def is_homogeneous(self) -> bool:
        return len({mono.degree for mono in self._terms}) <= 1

    # Linear structure

    def _coerce(self, other) -> "InvariantForm":
        if isinstance(other, InvariantForm):
            if other.n != self.n:
                raise DimensionMismatch(self.n, other.n)
            return other
        return InvariantForm.scalar(self.n, self.domain, other)

    def __add__(self, other):
        left, right = _unify(self, self._coerce(other))
        terms = dict(left._terms)
        for mono, coeff in right._terms.items():
            terms[mono] = terms[mono] + coeff if mono in terms else coeff
        return InvariantForm(left.n, left.domain, terms)

    __radd__ = __add__

    def __neg__(self):
        return InvariantForm(self.n, self.domain, {mono: -coeff for mono, coeff in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, value) -> "InvariantForm":
        try:
            factor = self.domain.convert(value)
        except TypeError:
            if not hasattr(value, "domain"):
                raise
            return self.map_coefficients(value.domain.convert, value.domain).scale(value)
        return InvariantForm(self.n, self.domain, {mono: coeff * factor for mono, coeff in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, InvariantForm):
            return self.wedge(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        divisor = self.domain.convert(other)
        if not divisor:
            raise ZeroDivisionError("Division of a form by zero")
        return InvariantForm(self.n, self.domain, {mono: coeff / divisor for mono, coeff in self._terms.items()})

    # Algebra

    def wedge(self, other: "InvariantForm") -> "InvariantForm":
        """Exterior product; graded-commutative with canonical re-sorting."""
        if other.n != self.n:
            raise DimensionMismatch(self.n, other.n)
        left, right = _unify(self, other)
        terms: Dict[Monomial, object] = {}
        for mono_a, coeff_a in left._terms.items():
            for mono_b, coeff_b in right._terms.items():
                sign, mono = mono_a.product(mono_b)
                if not sign:
                    continue
                value = coeff_a * coeff_b
                if sign < 0:
                    value = -value
                terms[mono] = terms[mono] + value if mono in terms else value
        return InvariantForm(left.n, left.domain, terms)

    def conjugate(self) -> "InvariantForm":
        """Antilinear involution mapping bidegree (p,q) to (q,p)."""
        terms = {}
        for mono, coeff in self._terms.items():
            sign, image = mono.conjugate()
            value = self.domain.conj(coeff)
            terms[image] = -value if sign < 0 else value
        return InvariantForm(self.n, self.domain, terms)

    def project(self, p: int, q: int) -> "InvariantForm":
        return InvariantForm(
            self.n, self.domain, {mono: c for mono, c in self._terms.items() if mono.bidegree == (p, q)}
        )

    def degree_part(self, k: int) -> "InvariantForm":
        return InvariantForm(self.n, self.domain, {mono: c for mono, c in self._terms.items() if mono.degree == k})

    def map_coefficients(self, fn: Callable, domain=None) -> "InvariantForm":
        """Apply fn to every coefficient, optionally moving to another domain."""
        return InvariantForm(self.n, domain or self.domain, {mono: fn(c) for mono, c in self._terms.items()})

    def real_part(self) -> "InvariantForm":
        return (self + self.conjugate()) / 2

    # Text

    def format(self) -> str:
        """Deterministic text in the `coeff*e[..|..]` syntax accepted by parse_form."""
        if not self._terms:
            return "0"
        pieces = []
        for index, (mono, coeff) in enumerate(self.sorted_items()):
            text = self.domain.format(coeff)
            negative = text.startswith("-") and not _needs_parentheses(text[1:])
            if negative:
                text = text[1:]
            if _needs_parentheses(text):
                text = f"({text})"
            if mono == UNIT:
                body = text
            elif text == "1":
                body = mono.text()
            else:
                body = f"{text}*{mono.text()}"
            if index == 0:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f" - {body}" if negative else f" + {body}")
        return "".join(pieces)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"InvariantForm(n={self.n}, {self.format()})"


def _needs_parentheses(text: str) -> bool:
    return " " in text or "+" in text[1:] or "-" in text[1:]


def _check_index(k: int, n: int):
    if not 1 <= k <= n:
        raise DimensionMismatch(k, n)


def _unify(a: InvariantForm, b: InvariantForm) -> Tuple[InvariantForm, InvariantForm]:
    """Bring two forms to a common coefficient domain (jets absorb plain scalars)."""
    if a.domain == b.domain:
        return a, b
    try:
        return a, b.map_coefficients(a.domain.convert, a.domain)
    except TypeError:
        return a.map_coefficients(b.domain.convert, b.domain), b


# Functional interface


def wedge(alpha: InvariantForm, beta: InvariantForm) -> InvariantForm:
    return alpha.wedge(beta)


def conjugate_form(alpha: InvariantForm) -> InvariantForm:
    return alpha.conjugate()


def bidegree_project(alpha: InvariantForm, p: int, q: int) -> InvariantForm:
    """Component of bidegree (p,q)."""
    return alpha.project(p, q)


def basis_monomials(n: int, p: int, q: int) -> List[Monomial]:
    """All canonical monomials of bidegree (p,q), in output order."""
    out = [
        Monomial(mask_of(holo), mask_of(anti))
        for holo in combinations(range(1, n + 1), p)
        for anti in combinations(range(1, n + 1), q)
    ]
    return sorted(out, key=Monomial.sort_key)


def parse_monomial(token: str, n: int, domain, text: str = "", offset: int = -1) -> InvariantForm:
    """
    Turn an `e[i,j|k,l]` token into a signed form.

    Args:
        token: The monomial token
        n: Complex dimension
        domain: Coefficient domain
        text: Whole input, for error messages
        offset: Token position, for error messages

    Returns:
        The wedge of the listed covectors in the listed order
    """
    match = _MONOMIAL_BODY.match(token)
    if not match:
        raise ParseError("Malformed monomial", text or token, offset, "e[i,j|k,l]")
    blocks = []
    for part in match.groups():
        items = [item.strip() for item in part.split(",") if item.strip()]
        try:
            indices = [int(item) for item in items]
        except ValueError as e:
            raise ParseError("Monomial index is not an integer", text or token, offset, "index") from e
        for k in indices:
            if not 1 <= k <= n:
                raise ParseError(f"Monomial index {k} outside 1..{n}", text or token, offset, "index")
        blocks.append(indices)
    return InvariantForm.monomial(n, domain, blocks[0], blocks[1])


def parse_form(text: str, n: int, domain) -> InvariantForm:
    """Parse a form expression such as `a1*e[1,2|] + i/2*e[1|1]`."""
    parser = ExpressionParser(
        domain,
        monomial=lambda token, offset: parse_monomial(token, n, domain, text, offset),
        lift=lambda value: InvariantForm.scalar(n, domain, value),
        form_type=InvariantForm,
    )
    value = parser.parse(text)
    if isinstance(value, InvariantForm):
        return value
    return InvariantForm.scalar(n, domain, value)
