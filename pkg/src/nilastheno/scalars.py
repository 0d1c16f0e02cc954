"""
Scalar Arithmetic Module
Gaussian rationals and the parametric fraction field with its conjugation involution
"""

import logging
import re
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from sympy import Symbol
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.fields import FracElement, FracField
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError
from sympy.polys.orderings import grlex

from .errors import (
    DenominatorVanishes,
    InvalidStructure,
    MissingParameter,
    ParseError,
    SingularOperator,
    SymbolicRankRefused,
)

logger = logging.getLogger(__name__)

# Distinguished real parameter of deformation curves; present in every session.
CURVE_PARAMETER = "t"
RESERVED_NAMES = frozenset({"e", "i", "conj", "re", "im"})

_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_TOKEN = re.compile(
    r"""\s*(?:
        (?P<number>\d+i?)
      | (?P<mono>e\[[^\]]*\])
      | (?P<name>[A-Za-z][A-Za-z0-9_]*)
      | (?P<op>[-+*/^(),])
    )""",
    re.VERBOSE,
)
# p/qi reads as (p/q)i where an operand starts; after "/" or "^" only integers are literals
_IMAGINARY_RATIONAL = re.compile(r"\s*(?P<number>\d+/\d+i)")

__all__ = [
    "CURVE_PARAMETER",
    "GaussianRational",
    "ScalarDomain",
    "ExpressionParser",
    "gaussian",
    "conjugate_gaussian",
    "format_gaussian",
    "conjugate_scalar",
    "specialize",
    "realpart_expression",
]


def gaussian(re_part=0, im_part=0) -> GaussianRational:
    """
    Build an exact Gaussian rational.

    Args:
        re_part: Real part (int, Fraction, or "p/q" string)
        im_part: Imaginary part

    Returns:
        Element of QQ_I in lowest terms
    """
    try:
        re_q = Fraction(re_part)
        im_q = Fraction(im_part)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"Invalid rational: {e}", f"{re_part}, {im_part}", 0, "p/q with q != 0") from e
    return QQ_I(QQ(re_q.numerator, re_q.denominator), QQ(im_q.numerator, im_q.denominator))


def conjugate_gaussian(z: GaussianRational) -> GaussianRational:
    return z.new(z.x, -z.y)


def _format_rational(q) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _format_imaginary(y) -> str:
    # i/2 rather than 1/2i, which would read as 1/(2i)
    sign = "-" if y < 0 else ""
    y = abs(y)
    numerator = "i" if y.numerator == 1 else f"{y.numerator}i"
    if y.denominator == 1:
        return f"{sign}{numerator}"
    return f"{sign}{numerator}/{y.denominator}"


def format_gaussian(z: GaussianRational) -> str:
    """Print a Gaussian rational in the input grammar, e.g. 3/2+i/2."""
    if not z.y:
        return _format_rational(z.x)
    if not z.x:
        return _format_imaginary(z.y)
    sign = "+" if z.y > 0 else "-"
    return f"{_format_rational(z.x)}{sign}{_format_imaginary(abs(z.y))}"


class ExpressionParser:
    """Recursive descent parser for the scalar and form expression grammar."""

    def __init__(
        self,
        domain: "ScalarDomain",
        monomial: Optional[Callable[[str, int], object]] = None,
        lift: Optional[Callable[[object], object]] = None,
        form_type: Optional[type] = None,
    ):
        """
        Args:
            domain: Scalar domain resolving numbers and identifiers
            monomial: Factory for `e[...]` tokens; None rejects them
            lift: Converts a scalar into a form when the two are combined
            form_type: Class of form values, used to dispatch mixed operations
        """
        self.domain = domain
        self.monomial = monomial
        self.lift = lift
        self.form_type = form_type

    def parse(self, text: str):
        self.text = text
        self.tokens = self._tokenize(text)
        self.pos = 0
        value = self._expr()
        if self.pos != len(self.tokens):
            kind, token, offset = self.tokens[self.pos]
            raise ParseError(f"Unexpected token '{token}'", text, offset, "operator or end of input")
        return value

    def _tokenize(self, text: str) -> List[Tuple[str, str, int]]:
        tokens = []
        offset = 0
        stripped = text.rstrip()
        while offset < len(stripped):
            match = None
            if not tokens or tokens[-1][1] not in ("/", "^"):
                match = _IMAGINARY_RATIONAL.match(stripped, offset)
            match = match or _TOKEN.match(stripped, offset)
            if not match or match.end() == offset:
                raise ParseError("Unrecognized character", text, offset, "number, name, e[...] or operator")
            kind = match.lastgroup
            tokens.append((kind, match.group(kind), match.start(kind)))
            offset = match.end()
        return tokens

    def _peek(self) -> Tuple[Optional[str], Optional[str]]:
        if self.pos < len(self.tokens):
            kind, token, _ = self.tokens[self.pos]
            return kind, token
        return None, None

    def _offset(self) -> int:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][2]
        return len(self.text)

    def _expect(self, token: str):
        kind, value = self._peek()
        if value != token:
            raise ParseError("Unexpected input", self.text, self._offset(), f"'{token}'")
        self.pos += 1

    def _is_form(self, value) -> bool:
        return self.form_type is not None and isinstance(value, self.form_type)

    def _coerce_pair(self, left, right):
        if self._is_form(left) and not self._is_form(right):
            right = self.lift(right)
        elif self._is_form(right) and not self._is_form(left):
            left = self.lift(left)
        return left, right

    def _expr(self):
        value = self._term()
        while True:
            kind, token = self._peek()
            if token not in ("+", "-") or kind != "op":
                return value
            self.pos += 1
            other = self._term()
            value, other = self._coerce_pair(value, other)
            value = value + other if token == "+" else value - other

    def _term(self):
        value = self._unary()
        while True:
            kind, token = self._peek()
            if token not in ("*", "/") or kind != "op":
                return value
            offset = self._offset()
            self.pos += 1
            other = self._unary()
            if token == "*":
                value, other = self._coerce_pair(value, other)
                value = value * other
            else:
                if self._is_form(other):
                    raise ParseError("Cannot divide by a form", self.text, offset, "scalar divisor")
                if not other:
                    raise DenominatorVanishes(f"Division by zero in {self.text!r}")
                value = value / other

    def _unary(self):
        kind, token = self._peek()
        if kind == "op" and token in ("+", "-"):
            self.pos += 1
            value = self._unary()
            return -value if token == "-" else value
        return self._power()

    def _power(self):
        value = self._atom()
        kind, token = self._peek()
        if kind == "op" and token == "^":
            offset = self._offset()
            self.pos += 1
            kind, exponent = self._peek()
            if kind != "number" or not exponent.isdigit():
                raise ParseError("Exponent must be a non-negative integer", self.text, self._offset(), "integer")
            self.pos += 1
            if self._is_form(value):
                raise ParseError("Forms cannot be raised to a power", self.text, offset, "scalar base")
            value = value ** int(exponent)
        return value

    def _atom(self):
        kind, token = self._peek()
        offset = self._offset()
        if kind is None:
            raise ParseError("Unexpected end of input", self.text, offset, "operand")
        self.pos += 1
        if kind == "number":
            return self.domain.constant(_parse_number(token))
        if kind == "mono":
            if self.monomial is None:
                raise ParseError("Monomials are not allowed in a scalar expression", self.text, offset, "scalar")
            return self.monomial(token, offset)
        if kind == "name":
            if token in ("conj", "re", "im"):
                self._expect("(")
                inner = self._expr()
                self._expect(")")
                if token == "conj":
                    return inner.conjugate() if self._is_form(inner) else self.domain.conj(inner)
                if self._is_form(inner):
                    raise ParseError(f"{token}() applies to scalars only", self.text, offset, "scalar argument")
                return self.domain.realpart(inner) if token == "re" else self.domain.imagpart(inner)
            if token == "i":
                return self.domain.imag_unit
            if token == "e":
                raise ParseError("Bare 'e' is reserved for monomials", self.text, offset, "e[...]")
            return self.domain.param(token)
        if token == "(":
            value = self._expr()
            self._expect(")")
            return value
        raise ParseError(f"Unexpected token '{token}'", self.text, offset, "operand")


def _parse_number(token: str) -> GaussianRational:
    imaginary = token.endswith("i")
    numerator, _, denominator = (token[:-1] if imaginary else token).partition("/")
    if denominator and not int(denominator):
        raise DenominatorVanishes(f"Zero denominator in literal '{token}'")
    value = Fraction(int(numerator), int(denominator or 1))
    return gaussian(0, value) if imaginary else gaussian(value, 0)


class ScalarDomain:
    """Session context: parameter registry plus the fraction field over Q(i)."""

    def __init__(self, params: Iterable[str] = (), real_params: Iterable[str] = ()):
        """
        Initialize the parameter registry

        Args:
            params: Complex parameter names; each gets an independent formal conjugate
            real_params: Real parameter names (fixed by conjugation); the curve
                parameter `t` is always registered
        """
        self.params = tuple(dict.fromkeys(params))
        real = list(dict.fromkeys(real_params))
        if CURVE_PARAMETER not in real and CURVE_PARAMETER not in self.params:
            real.append(CURVE_PARAMETER)
        self.real_params = tuple(real)
        for name in self.params + self.real_params:
            if not _NAME.match(name) or name in RESERVED_NAMES:
                raise InvalidStructure(f"Invalid parameter name '{name}'")
        overlap = set(self.params) & set(self.real_params)
        if overlap:
            raise InvalidStructure(f"Parameters declared both complex and real: {sorted(overlap)}")

        symbols = []
        self._labels: List[str] = []
        self._conj_index: List[int] = []
        self._index: Dict[str, int] = {}
        for name in self.params:
            position = len(symbols)
            symbols.extend([Symbol(name), Symbol(f"{name}_bar")])
            self._labels.extend([name, f"conj({name})"])
            self._conj_index.extend([position + 1, position])
            self._index[name] = position
        for name in self.real_params:
            position = len(symbols)
            symbols.append(Symbol(name))
            self._labels.append(name)
            self._conj_index.append(position)
            self._index[name] = position

        self.field = FracField(symbols, QQ_I, grlex)
        self.ring = self.field.ring
        self.zero = self.field.zero
        self.one = self.field.one
        self.imag_unit = self.field.ground_new(QQ_I(0, 1))
        self._matrix_domain = self.field.to_domain()

    def __eq__(self, other):
        return (
            isinstance(other, ScalarDomain)
            and self.params == other.params
            and self.real_params == other.real_params
        )

    def __hash__(self):
        return hash((self.params, self.real_params))

    def __repr__(self):
        return f"ScalarDomain(params={list(self.params)}, real_params={list(self.real_params)})"

    # Construction

    def extended(self, params: Iterable[str] = (), real_params: Iterable[str] = ()) -> "ScalarDomain":
        """Return a domain whose registry also contains the given names."""
        return ScalarDomain(self.params + tuple(params), self.real_params + tuple(real_params))

    def transfer(self, s: FracElement) -> FracElement:
        """Re-home an element of a sub-registry domain into this field."""
        if s.field == self.field:
            return s
        return s.set_field(self.field)

    def param(self, name: str) -> FracElement:
        if name not in self._index:
            raise MissingParameter(name, f"Undeclared parameter '{name}'")
        return self.field.gens[self._index[name]]

    def conj_param(self, name: str) -> FracElement:
        return self.conj(self.param(name))

    def constant(self, value) -> FracElement:
        if isinstance(value, GaussianRational):
            return self.field.ground_new(value)
        return self.field.ground_new(gaussian(value))

    def convert(self, value) -> FracElement:
        """Coerce ints, Fractions, Gaussian rationals and field elements."""
        if isinstance(value, FracElement):
            return self.transfer(value)
        if isinstance(value, (int, Fraction, GaussianRational)):
            return self.constant(value)
        if isinstance(value, str):
            return self.parse(value)
        raise TypeError(f"Cannot convert {value!r} to a parametric scalar")

    # Involution and real structure

    def conj(self, s: FracElement) -> FracElement:
        """Swap each parameter with its conjugate and conjugate every coefficient."""
        return self.field.new(self._conj_poly(s.numer), self._conj_poly(s.denom))

    def _conj_poly(self, poly):
        perm = self._conj_index
        terms = {}
        for monom, coeff in poly.terms():
            swapped = [0] * len(monom)
            for position, exponent in enumerate(monom):
                swapped[perm[position]] = exponent
            terms[tuple(swapped)] = conjugate_gaussian(coeff)
        return self.ring.from_dict(terms)

    def realpart(self, s: FracElement) -> FracElement:
        return (s + self.conj(s)) / 2

    def imagpart(self, s: FracElement) -> FracElement:
        return (s - self.conj(s)) / (2 * self.imag_unit)

    def is_real(self, s: FracElement) -> bool:
        return self.conj(s) == s

    # Inspection

    def is_constant(self, s: FracElement) -> bool:
        return s.numer.is_ground and s.denom.is_ground

    def to_gaussian(self, s: FracElement) -> GaussianRational:
        """Return the Gaussian rational value of a parameter-free scalar."""
        if not self.is_constant(s):
            raise SymbolicRankRefused(f"Coefficient {self.format(s)} depends on parameters; specialize first")
        if not s.numer:
            return QQ_I.zero
        return QQ_I.convert(s.numer.LC) / QQ_I.convert(s.denom.LC)

    def generator_positions(self, name: str) -> Tuple[int, ...]:
        """Positions of a parameter and of its conjugate among the field generators."""
        if name not in self._index:
            raise MissingParameter(name, f"Undeclared parameter '{name}'")
        position = self._index[name]
        return tuple(sorted({position, self._conj_index[position]}))

    def parameters_of(self, s: FracElement) -> List[str]:
        """Base names of the parameters occurring in s, in registry order."""
        used = set()
        for poly in (s.numer, s.denom):
            for monom in poly.monoms():
                for position, exponent in enumerate(monom):
                    if exponent:
                        used.add(position)
        names = []
        for name in self.params + self.real_params:
            position = self._index[name]
            if position in used or self._conj_index[position] in used:
                names.append(name)
        return names

    # Evaluation

    def _generator_values(self, assignment: Dict[str, object]) -> List[Optional[GaussianRational]]:
        values: List[Optional[GaussianRational]] = [None] * self.field.ngens
        for name, raw in assignment.items():
            if name not in self._index:
                raise MissingParameter(name, f"Undeclared parameter '{name}' in assignment")
            value = self.to_gaussian(self.convert(raw)) if not isinstance(raw, GaussianRational) else raw
            position = self._index[name]
            if name in self.real_params and value.y:
                raise InvalidStructure(f"Real parameter '{name}' assigned non-real value {format_gaussian(value)}")
            values[position] = value
            values[self._conj_index[position]] = conjugate_gaussian(value) if name in self.params else value
        return values

    def _evaluate_poly(self, poly, values) -> GaussianRational:
        total = QQ_I.zero
        for monom, coeff in poly.terms():
            term = QQ_I.convert(coeff)
            for position, exponent in enumerate(monom):
                if exponent:
                    if values[position] is None:
                        raise MissingParameter(self._base_name(position))
                    term = term * values[position] ** exponent
            total = total + term
        return total

    def _base_name(self, position: int) -> str:
        label = self._labels[position]
        return label[5:-1] if label.startswith("conj(") else label

    def specialize(self, s: FracElement, assignment: Dict[str, object]) -> GaussianRational:
        """
        Evaluate exactly at a full numeric assignment.

        Args:
            s: Parametric scalar
            assignment: Parameter name -> value; conjugates follow automatically

        Returns:
            Gaussian rational value
        """
        values = self._generator_values(assignment)
        numerator = self._evaluate_poly(s.numer, values)
        denominator = self._evaluate_poly(s.denom, values)
        if not denominator:
            raise DenominatorVanishes(f"Denominator of {self.format(s)} vanishes at the given point")
        return numerator / denominator

    def substitute(self, s: FracElement, assignment: Dict[str, object]) -> FracElement:
        """Partial specialization: replace the assigned parameters, keep the rest symbolic."""
        if not assignment:
            return s
        values = self._generator_values(assignment)
        pairs = [
            (self.field.gens[position].numer, value)
            for position, value in enumerate(values)
            if value is not None
        ]
        numerator = s.numer.subs(pairs) if len(s.numer) else s.numer
        denominator = s.denom.subs(pairs)
        if not denominator:
            raise DenominatorVanishes(f"Denominator of {self.format(s)} vanishes at the given point")
        return self.field.new(numerator, denominator)

    def derivative(self, s: FracElement, name: str) -> FracElement:
        return s.diff(self.param(name))

    # Exact matrices over the fraction field

    def determinant(self, rows: List[List[FracElement]]):
        size = len(rows)
        return DomainMatrix(rows, (size, size), self._matrix_domain).det()

    def inverse_matrix(self, rows: List[List[FracElement]], description: str = "") -> List[List[FracElement]]:
        size = len(rows)
        matrix = DomainMatrix(rows, (size, size), self._matrix_domain)
        try:
            inverse = matrix.inv()
        except (DMNonInvertibleMatrixError, ZeroDivisionError):
            raise SingularOperator(matrix.det(), description)
        return inverse.to_list()

    # Factorization helpers used for condition presentation

    def factor(self, s: FracElement) -> Tuple[FracElement, List[Tuple[FracElement, int]], List[Tuple[FracElement, int]]]:
        """
        Split s into a constant, numerator factors and denominator factors.

        Returns:
            (constant, [(factor, multiplicity)], [(factor, multiplicity)])
        """
        num_coeff, num_factors = s.numer.factor_list()
        den_coeff, den_factors = s.denom.factor_list()
        constant = self.constant(QQ_I.convert(num_coeff) / QQ_I.convert(den_coeff))
        lift = lambda poly: self.field.new(poly, self.ring.one)
        return (
            constant,
            [(lift(poly), k) for poly, k in num_factors],
            [(lift(poly), k) for poly, k in den_factors],
        )

    def normalize_condition(self, s: FracElement) -> FracElement:
        """Numerator of s scaled to leading coefficient 1; zero stays zero."""
        numerator = s.numer
        if not numerator:
            return self.zero
        return self.field.new(numerator.monic(), self.ring.one)

    # Text

    def parse(self, text: str) -> FracElement:
        value = ExpressionParser(self).parse(text)
        return self.convert(value) if not isinstance(value, FracElement) else value

    def format(self, s: FracElement) -> str:
        """Canonical printer; parse(format(s)) == s."""
        if s.denom.is_ground:
            return self._format_poly(s.numer.mul_ground(QQ_I.one / QQ_I.convert(s.denom.LC)))
        numerator = self._format_poly(s.numer)
        if len(s.numer) > 1:
            numerator = f"({numerator})"
        return f"{numerator}/({self._format_poly(s.denom)})"

    def _format_monomial(self, monom) -> str:
        parts = []
        for position, exponent in enumerate(monom):
            if exponent == 1:
                parts.append(self._labels[position])
            elif exponent:
                parts.append(f"{self._labels[position]}^{exponent}")
        return "*".join(parts)

    def _format_term(self, coeff, monom) -> Tuple[bool, str]:
        coeff = QQ_I.convert(coeff)
        mono = self._format_monomial(monom)
        negative = False
        unit = False
        if not coeff.y:
            negative = coeff.x < 0
            text = _format_rational(abs(coeff.x))
            unit = abs(coeff.x) == 1
        elif not coeff.x:
            negative = coeff.y < 0
            text = _format_imaginary(abs(coeff.y))
        else:
            text = f"({format_gaussian(coeff)})"
        if not mono:
            body = text
        elif unit:
            body = mono
        else:
            body = f"{text}*{mono}"
        return negative, body

    def _format_poly(self, poly) -> str:
        terms = poly.terms()
        if not terms:
            return "0"
        if len(terms) == 1 and not any(terms[0][0]):
            return format_gaussian(QQ_I.convert(terms[0][1]))
        pieces = []
        for index, (monom, coeff) in enumerate(terms):
            negative, body = self._format_term(coeff, monom)
            if index == 0:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f" - {body}" if negative else f" + {body}")
        return "".join(pieces)


def conjugate_scalar(domain: ScalarDomain, s: FracElement) -> FracElement:
    """Complex conjugation of a parametric scalar."""
    return domain.conj(s)


def specialize(domain: ScalarDomain, s: FracElement, assignment: Dict[str, object]) -> GaussianRational:
    """Exact evaluation; raises DenominatorVanishes or MissingParameter."""
    return domain.specialize(s, assignment)


def realpart_expression(domain: ScalarDomain, s: FracElement) -> FracElement:
    """Formal real part (s + conj(s))/2."""
    return domain.realpart(s)
