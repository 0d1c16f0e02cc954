"""
Deformation Module
Deformed coframes, Maurer-Cartan residuals, the deformed operators and first-order jets in the curve parameter
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple, Union

from .algebra import ComplexNilAlgebra, del_, delbar, exterior_derivative
from .contraction import (
    CoframeOperator,
    VectorForm01,
    contract,
    contract_bar,
    extension_map,
    identity_plus,
    operator_inverse,
    phi_phibar,
    phibar_phi,
    simultaneous_contract,
)
from .errors import InvalidStructure, NotIntegrableAt
from .exterior import InvariantForm
from .scalars import CURVE_PARAMETER, ScalarDomain

logger = logging.getLogger(__name__)


class FirstOrderJet:
    """a + b*t modulo t^2 over a scalar domain"""

    __slots__ = ("domain", "value", "deriv")

    def __init__(self, domain: "JetDomain", value, deriv):
        self.domain = domain
        self.value = value
        self.deriv = deriv

    def _lift(self, other) -> "FirstOrderJet":
        if isinstance(other, FirstOrderJet):
            return other
        return FirstOrderJet(self.domain, self.domain.base.convert(other), self.domain.base.zero)

    def __add__(self, other):
        other = self._lift(other)
        return FirstOrderJet(self.domain, self.value + other.value, self.deriv + other.deriv)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        return FirstOrderJet(self.domain, self.value - other.value, self.deriv - other.deriv)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return FirstOrderJet(self.domain, -self.value, -self.deriv)

    def __mul__(self, other):
        other = self._lift(other)
        return FirstOrderJet(
            self.domain,
            self.value * other.value,
            self.value * other.deriv + self.deriv * other.value,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if not other.value:
            raise ZeroDivisionError("Jet division by an element with zero constant term")
        value = self.value / other.value
        deriv = (self.deriv * other.value - self.value * other.deriv) / (other.value * other.value)
        return FirstOrderJet(self.domain, value, deriv)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, exponent: int):
        result = self.domain.one
        for _ in range(exponent):
            result = result * self
        return result

    def __bool__(self):
        return bool(self.value) or bool(self.deriv)

    def __eq__(self, other):
        if isinstance(other, FirstOrderJet):
            return self.value == other.value and self.deriv == other.deriv
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self.value == other.value and self.deriv == other.deriv

    __hash__ = None

    def __repr__(self):
        return f"FirstOrderJet({self.domain.base.format(self.value)}, {self.domain.base.format(self.deriv)})"


class JetDomain:
    """Coefficient domain of first-order jets; conjugation acts componentwise since t is real."""

    def __init__(self, base: ScalarDomain):
        self.base = base
        self.zero = FirstOrderJet(self, base.zero, base.zero)
        self.one = FirstOrderJet(self, base.one, base.zero)
        self.epsilon = FirstOrderJet(self, base.zero, base.one)

    def __eq__(self, other):
        return isinstance(other, JetDomain) and other.base == self.base

    def __hash__(self):
        return hash(("jet", self.base))

    def jet(self, value, deriv) -> FirstOrderJet:
        return FirstOrderJet(self, self.base.convert(value), self.base.convert(deriv))

    def convert(self, value) -> FirstOrderJet:
        if isinstance(value, FirstOrderJet):
            return value
        return FirstOrderJet(self, self.base.convert(value), self.base.zero)

    def conj(self, s: FirstOrderJet) -> FirstOrderJet:
        return FirstOrderJet(self, self.base.conj(s.value), self.base.conj(s.deriv))

    def is_constant(self, s: FirstOrderJet) -> bool:
        return self.base.is_constant(s.value) and self.base.is_constant(s.deriv)

    def format(self, s: FirstOrderJet) -> str:
        return f"[{self.base.format(s.value)}; {self.base.format(s.deriv)}]"

    def determinant(self, rows):
        values = [[entry.value for entry in row] for row in rows]
        return self.base.determinant(values)

    def inverse_matrix(self, rows, description: str = ""):
        """(A + tB)^-1 = A^-1 - t A^-1 B A^-1."""
        values = [[entry.value for entry in row] for row in rows]
        derivs = [[entry.deriv for entry in row] for row in rows]
        inverse = self.base.inverse_matrix(values, description)
        size = len(rows)

        def product(left, right):
            return [
                [sum((left[i][k] * right[k][j] for k in range(size)), self.base.zero) for j in range(size)]
                for i in range(size)
            ]

        correction = product(product(inverse, derivs), inverse)
        return [
            [FirstOrderJet(self, inverse[i][j], -correction[i][j]) for j in range(size)]
            for i in range(size)
        ]

    # Form helpers

    def lift(self, alpha: InvariantForm) -> InvariantForm:
        return alpha.map_coefficients(self.convert, self)

    def value_part(self, alpha: InvariantForm) -> InvariantForm:
        return alpha.map_coefficients(lambda c: c.value, self.base)

    def deriv_part(self, alpha: InvariantForm) -> InvariantForm:
        return alpha.map_coefficients(lambda c: c.deriv, self.base)

    def family(self, value: InvariantForm, deriv: InvariantForm) -> InvariantForm:
        """The jet form value + t * deriv."""
        return self.lift(value) + deriv.map_coefficients(lambda c: FirstOrderJet(self, self.base.zero, c), self)


class DeformationCurve:
    """A curve phi(t) of (0,1)-vector forms with phi(0) = 0"""

    def __init__(self, algebra: ComplexNilAlgebra, phi: VectorForm01, parameter: str = CURVE_PARAMETER):
        """
        Args:
            algebra: Central fiber
            phi: Entries are rational functions of the curve parameter
            parameter: Name of the real curve parameter
        """
        if phi.n != algebra.n:
            raise InvalidStructure(f"Curve over n={phi.n} for an algebra with n={algebra.n}")
        self.algebra = algebra
        self.phi = phi
        self.parameter = parameter
        domain = phi.domain
        for (k, j), value in phi.coeffs.items():
            at_zero = domain.substitute(value, {parameter: 0})
            if at_zero:
                raise InvalidStructure(
                    f"phi(0) must vanish; entry {k}|{j} is {domain.format(at_zero)} at {parameter}=0"
                )

    @property
    def n(self) -> int:
        return self.algebra.n

    @property
    def domain(self) -> ScalarDomain:
        return self.phi.domain

    def derivative_at_zero(self) -> VectorForm01:
        """phi'(0), entrywise."""
        domain = self.domain
        return VectorForm01(
            self.n,
            domain,
            {
                key: domain.substitute(domain.derivative(value, self.parameter), {self.parameter: 0})
                for key, value in self.phi.coeffs.items()
            },
        )

    def at(self, assignment: Dict[str, object]) -> VectorForm01:
        domain = self.domain
        return self.phi.map_coefficients(lambda c: domain.substitute(c, assignment))

    def jet(self) -> VectorForm01:
        """phi(t) = t phi'(0) mod t^2, over the jet domain."""
        return jet_vector_form(self.derivative_at_zero())

    @classmethod
    def linear(cls, algebra: ComplexNilAlgebra, phi_prime: VectorForm01) -> "DeformationCurve":
        """The straight curve t -> t phi'."""
        t = phi_prime.domain.param(CURVE_PARAMETER)
        return cls(algebra, phi_prime.map_coefficients(lambda c: c * t))


Deformation = Union[DeformationCurve, VectorForm01]


def jet_vector_form(phi_prime: VectorForm01) -> VectorForm01:
    jets = JetDomain(phi_prime.domain)
    return phi_prime.map_coefficients(lambda c: FirstOrderJet(jets, jets.base.zero, c), jets)


def _phi_of(c: Deformation) -> VectorForm01:
    return c.phi if isinstance(c, DeformationCurve) else c


@dataclass
class DeformedCoframe:
    """eta_t^j in the eta basis and eta^j in the eta_t basis"""

    forward: List[InvariantForm]
    inverse: List[InvariantForm]
    operator: CoframeOperator
    inverse_operator: CoframeOperator


def deformed_coframe(c: Deformation) -> DeformedCoframe:
    """
    Forward images via the extension map, inverse via the matrix inverse.

    Raises:
        SingularOperator: when I + phi + conj(phi) is not invertible
    """
    phi = _phi_of(c)
    E = identity_plus(phi)
    E_inverse = operator_inverse(E)
    return DeformedCoframe(
        forward=[E.image(a) for a in range(phi.n)],
        inverse=[E_inverse.image(a) for a in range(phi.n)],
        operator=E,
        inverse_operator=E_inverse,
    )


def _algebra_for(c: Deformation, g: ComplexNilAlgebra = None) -> ComplexNilAlgebra:
    if g is not None:
        return g
    if isinstance(c, DeformationCurve):
        return c.algebra
    raise InvalidStructure("A bare vector form needs the algebra passed explicitly")


def _in_deformed_basis(coframe: DeformedCoframe, form: InvariantForm) -> InvariantForm:
    return simultaneous_contract(coframe.inverse_operator, form)


def integrability_residual(c: Deformation, g: ComplexNilAlgebra = None) -> List[Tuple[int, InvariantForm]]:
    """
    (d eta_t^j)^{0,2} in the eta_t basis for every j with a nonzero residual.

    Args:
        c: Curve or vector-form family
        g: Central algebra; defaults to the curve's algebra

    Returns:
        [(j, residual)] ordered by j; empty iff the deformed structure is integrable
    """
    g = _algebra_for(c, g)
    coframe = deformed_coframe(c)
    residuals = []
    for j, forward in enumerate(coframe.forward, start=1):
        differential = exterior_derivative(g, forward)
        residual = _in_deformed_basis(coframe, differential).project(0, 2)
        if residual:
            residuals.append((j, residual))
    return residuals


def residual_polynomials(c: Deformation, g: ComplexNilAlgebra = None) -> List[object]:
    """Distinct normalized numerators of the residual coefficients, in emission order."""
    domain = _phi_of(c).domain
    found = []
    for _, residual in integrability_residual(c, g):
        for _, coeff in residual.sorted_items():
            normalized = domain.normalize_condition(coeff)
            if normalized and normalized not in found:
                found.append(normalized)
    return found


def del_t(c: Deformation, alpha: InvariantForm, g: ComplexNilAlgebra = None) -> InvariantForm:
    """
    del_t(e^iota alpha) = e^iota((I - phi conj phi)^-1 ([delbar, iota_conj phi] + del)(I - phi conj phi) alpha)

    Args:
        c: Curve or vector form (scalar or jet coefficients)
        alpha: Form on the central fiber

    Returns:
        The deformed del of the extension of alpha, in the eta basis
    """
    g = _algebra_for(c, g)
    phi = _phi_of(c)
    return extension_map(phi, _del_t_inner(g, phi, alpha))


def delbar_t(c: Deformation, alpha: InvariantForm, g: ComplexNilAlgebra = None) -> InvariantForm:
    """Conjugate counterpart of del_t using (I - conj phi phi) and [del, iota_phi] + delbar."""
    g = _algebra_for(c, g)
    phi = _phi_of(c)
    return extension_map(phi, _delbar_t_inner(g, phi, alpha))


def _del_t_inner(g: ComplexNilAlgebra, phi: VectorForm01, alpha: InvariantForm) -> InvariantForm:
    A = CoframeOperator.identity(phi.n, phi.domain) - phi_phibar(phi)
    twisted = simultaneous_contract(A, alpha)
    image = delbar(g, contract_bar(phi, twisted)) - contract_bar(phi, delbar(g, twisted)) + del_(g, twisted)
    return simultaneous_contract(operator_inverse(A), image)


def _delbar_t_inner(g: ComplexNilAlgebra, phi: VectorForm01, alpha: InvariantForm) -> InvariantForm:
    B = CoframeOperator.identity(phi.n, phi.domain) - phibar_phi(phi)
    twisted = simultaneous_contract(B, alpha)
    image = del_(g, contract(phi, twisted)) - contract(phi, del_(g, twisted)) + delbar(g, twisted)
    return simultaneous_contract(operator_inverse(B), image)


def ddbar_t(c: Deformation, alpha: InvariantForm, g: ComplexNilAlgebra = None) -> InvariantForm:
    """del_t delbar_t of the extension of alpha, composed through the inner representatives."""
    g = _algebra_for(c, g)
    phi = _phi_of(c)
    return extension_map(phi, _del_t_inner(g, phi, _delbar_t_inner(g, phi, alpha)))


def _projected(c: Deformation, alpha: InvariantForm, g: ComplexNilAlgebra, shift: Tuple[int, int]) -> InvariantForm:
    g = _algebra_for(c, g)
    coframe = deformed_coframe(c)
    result = InvariantForm.zero(alpha.n, coframe.operator.domain)
    for p, q in alpha.bidegrees():
        extended = simultaneous_contract(coframe.operator, alpha.project(p, q))
        differential = _in_deformed_basis(coframe, exterior_derivative(g, extended))
        component = differential.project(p + shift[0], q + shift[1])
        result = result + simultaneous_contract(coframe.operator, component)
    return result


def del_t_by_projection(c: Deformation, alpha: InvariantForm, g: ComplexNilAlgebra = None) -> InvariantForm:
    """(p+1,q)_t component of d(e^iota alpha), mapped back to the eta basis."""
    return _projected(c, alpha, g, (1, 0))


def delbar_t_by_projection(c: Deformation, alpha: InvariantForm, g: ComplexNilAlgebra = None) -> InvariantForm:
    return _projected(c, alpha, g, (0, 1))


def pullback_structure(c: Deformation, point: Dict[str, object], g: ComplexNilAlgebra = None) -> ComplexNilAlgebra:
    """
    Structure equations of the deformed structure at a parameter point.

    Args:
        c: Curve or vector-form family
        point: Assignment for t and any other parameters to fix
        g: Central algebra; defaults to the curve's algebra

    Returns:
        ComplexNilAlgebra whose d(eta^j) is d(eta_t^j) written in the eta_t basis

    Raises:
        NotIntegrableAt: when a (0,2) residual survives at the point
        SingularOperator: when the coframe change is not invertible there
    """
    g = _algebra_for(c, g)
    domain = g.domain
    phi = _phi_of(c).map_coefficients(lambda value: domain.substitute(value, point))
    base = g.substitute(point)
    residual = integrability_residual(phi, base)
    if residual:
        raise NotIntegrableAt(dict(point), residual)
    coframe = deformed_coframe(phi)
    dtable = {}
    for j, forward in enumerate(coframe.forward, start=1):
        dtable[j] = _in_deformed_basis(coframe, exterior_derivative(base, forward))
    shown = ", ".join(f"{k}={v}" for k, v in sorted(point.items()))
    name = f"{g.name or 'algebra'} at {shown}"
    logger.info(f"Pulled back structure equations for {name}")
    return ComplexNilAlgebra(g.n, domain, dtable, False, name)
