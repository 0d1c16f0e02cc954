"""
Obstruction Module
The form del(iota_phi' del omega^(n-2)), the necessary class condition, the solvability check and the first-order jet identity
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .algebra import INVARIANT_LEVEL, ComplexNilAlgebra, ddbar, del_, delbar
from .cohomology import NONZERO_CLASS, BCVerdict, bc_class_vanishes, harmonicity_residuals, solve_ddbar
from .contraction import VectorForm01, contract, contract_bar, contraction_derivation
from .deformation import DeformationCurve, JetDomain, ddbar_t, jet_vector_form
from .errors import InvalidStructure, SymbolicRankRefused
from .exterior import InvariantForm, Monomial
from .metrics import HermitianMetric, check_special_metric, express_in_span, fundamental_power, normalized_power

logger = logging.getLogger(__name__)

SOLVABLE = "SOLVABLE"
UNSOLVABLE = "UNSOLVABLE"
HOLDS = "HOLDS"
FAILS = "FAILS"
DEFERRED = "SymbolicDeferred"
VANISHES = "Vanishes"


def _check_inputs(g: ComplexNilAlgebra, m: HermitianMetric, phi_prime: VectorForm01):
    if m.n != g.n or phi_prime.n != g.n:
        raise InvalidStructure(f"Dimensions differ: algebra {g.n}, metric {m.n}, vector form {phi_prime.n}")
    if g.n < 2:
        raise InvalidStructure("The obstruction needs n >= 2")


def obstruction_of(g: ComplexNilAlgebra, phi_prime: VectorForm01, power: InvariantForm) -> InvariantForm:
    """del(iota_phi' del power)."""
    return del_(g, contract(phi_prime, del_(g, power)))


def obstruction_form(g: ComplexNilAlgebra, m: HermitianMetric, phi_prime: VectorForm01) -> InvariantForm:
    """
    Theta = del(phi'(0) -| del omega^(n-2)).

    Args:
        g: Algebra
        m: Hermitian metric over g
        phi_prime: First-order term of the curve

    Returns:
        Form of bidegree (n-1, n-1)
    """
    _check_inputs(g, m, phi_prime)
    return obstruction_of(g, phi_prime, fundamental_power(m, g.n - 2))


def two_i_imaginary(theta: InvariantForm) -> InvariantForm:
    """2i Im(theta) = theta - conj(theta)."""
    return theta - theta.conjugate()


@dataclass
class CorollaryVerdict:
    """Class verdicts for Theta and Im(Theta), or a deferred symbolic condition"""

    status: str
    theta_verdict: Optional[BCVerdict] = None
    imaginary_verdict: Optional[BCVerdict] = None
    conditions: List[object] = field(default_factory=list)
    condition_display: str = ""
    hypotheses: List[str] = field(default_factory=list)
    pattern: Optional[InvariantForm] = None
    level: str = INVARIANT_LEVEL

    def to_dict(self, domain) -> dict:
        return {
            "status": self.status,
            "theta_class": self.theta_verdict.to_dict(domain) if self.theta_verdict else None,
            "imaginary_class": self.imaginary_verdict.to_dict(domain) if self.imaginary_verdict else None,
            "conditions": [domain.format(c) for c in self.conditions],
            "condition_display": self.condition_display,
            "hypotheses": list(self.hypotheses),
            "pattern": self.pattern.format() if self.pattern is not None else None,
            "level": self.level,
        }


def _split_scalar_pattern(theta: InvariantForm):
    """Write theta = C * psi with psi parameter-free, C the first nonzero coefficient."""
    domain = theta.domain
    designated, scalar = theta.sorted_items()[0]
    psi = theta / scalar
    if not all(domain.is_constant(c) for _, c in psi.items()):
        return None
    return designated, scalar, psi


def _real_factor_display(domain, scalar, imaginary: bool) -> str:
    """Present re(C) or im(C) as R * re(Q) with the real factors of C pulled out."""
    constant, numerator, denominator = domain.factor(scalar)
    real, rest = [], []
    for poly, multiplicity in numerator:
        (real if domain.is_real(poly) else rest).append((poly, multiplicity))
    outer = domain.one
    for poly, multiplicity in real:
        outer = outer * poly ** multiplicity
    inner = constant
    for poly, multiplicity in rest:
        inner = inner * poly ** multiplicity
    for poly, multiplicity in denominator:
        inner = inner / poly ** multiplicity
    if domain.is_real(constant) and outer != domain.one:
        outer, inner = outer * constant, inner / constant
    function = "im" if imaginary else "re"
    inner_text = f"{function}({domain.format(inner)})"
    if outer == domain.one:
        return inner_text
    return f"({domain.format(outer)})*{inner_text}"


def _denominator_hypotheses(domain, scalar) -> List[str]:
    _, _, denominator = domain.factor(scalar)
    hypotheses = []
    for poly, _ in denominator:
        text = f"{domain.format(poly)} != 0"
        if text not in hypotheses:
            hypotheses.append(text)
    return hypotheses


def _class_hypotheses(g: ComplexNilAlgebra, m: HermitianMetric, psi: InvariantForm) -> Optional[List[str]]:
    """
    Conditions under which psi is Bott-Chern harmonic, hence a nonzero class.

    Closedness must hold identically. Each coefficient of del delbar * psi is
    either implied by the astheno-Kaehler conditions of m or recorded as an
    extra hypothesis.
    """
    closed, coclosed = harmonicity_residuals(g, m, psi)
    if closed:
        return None
    domain = g.domain
    astheno = check_special_metric(g, m, "astheno").conditions
    generators = astheno + [domain.conj(c) for c in astheno]
    hypotheses = []
    for _, coeff in coclosed.sorted_items():
        if not coeff.denom.is_ground:
            return None
        if express_in_span(domain, coeff, generators) is None:
            text = f"{domain.format(domain.normalize_condition(coeff))} = 0"
            if text not in hypotheses:
                hypotheses.append(text)
    return hypotheses


def corollary_check(g: ComplexNilAlgebra, m: HermitianMetric, phi_prime: VectorForm01, theta: InvariantForm = None) -> CorollaryVerdict:
    """
    Necessary condition [Theta] = 0 (and [Im Theta] = 0) in invariant H_BC^{n-1,n-1}.

    Numeric algebras get both class verdicts. Symbolic algebras are handled when
    Theta = C * psi with psi constant, conj(psi) = -psi or psi, and psi harmonic
    under the metric's astheno conditions; the emitted condition is the real
    (or imaginary) part of C.

    Raises:
        SymbolicRankRefused: symbolic algebra outside that pattern
    """
    if theta is None:
        theta = obstruction_form(g, m, phi_prime)
    domain = g.domain
    if not theta:
        return CorollaryVerdict(VANISHES, hypotheses=[])

    numeric = g.is_numeric() and all(domain.is_constant(c) for _, c in theta.items())
    if numeric:
        imaginary = two_i_imaginary(theta) / (2 * domain.imag_unit)
        theta_verdict = bc_class_vanishes(g, theta)
        imaginary_verdict = bc_class_vanishes(g, imaginary)
        status = VANISHES if theta_verdict.vanishes and imaginary_verdict.vanishes else NONZERO_CLASS
        return CorollaryVerdict(status, theta_verdict, imaginary_verdict)

    split = _split_scalar_pattern(theta)
    if split is None:
        raise SymbolicRankRefused("Theta is not a scalar multiple of a constant form; specialize first")
    designated, scalar, psi = split
    conjugate = psi.conjugate()
    if conjugate == -psi:
        imaginary_part = False
        condition = domain.realpart(scalar)
    elif conjugate == psi:
        imaginary_part = True
        condition = domain.imagpart(scalar)
    else:
        raise SymbolicRankRefused("conj(psi) is not +-psi; specialize first")
    class_hypotheses = _class_hypotheses(g, m, psi)
    if class_hypotheses is None:
        raise SymbolicRankRefused("Nonvanishing of [psi] is not certified symbolically; specialize first")

    hypotheses = _denominator_hypotheses(domain, scalar) + ["metric is astheno-Kaehler"] + class_hypotheses
    verdict = CorollaryVerdict(
        DEFERRED,
        conditions=[domain.normalize_condition(condition)],
        condition_display=_real_factor_display(domain, scalar, imaginary_part) + " = 0",
        hypotheses=hypotheses,
        pattern=psi,
    )
    logger.info(f"Symbolic obstruction condition: {verdict.condition_display}")
    return verdict


@dataclass
class TheoremVerdict:
    """Solvability of del delbar X = 2i Im(Theta), or an exact check of a given X"""

    status: str
    target: InvariantForm
    witness: Optional[InvariantForm] = None
    certificate: Dict[Monomial, object] = field(default_factory=dict)
    level: str = INVARIANT_LEVEL

    def to_dict(self, domain) -> dict:
        return {
            "status": self.status,
            "target": self.target.format(),
            "witness": self.witness.format() if self.witness is not None else None,
            "certificate": {mono.text(): domain.format(v) for mono, v in sorted(
                self.certificate.items(), key=lambda item: item[0].sort_key())},
            "level": self.level,
        }


def theorem_check(
    g: ComplexNilAlgebra,
    m: HermitianMetric,
    phi_prime: VectorForm01,
    omega_prime: Optional[InvariantForm] = None,
    theta: InvariantForm = None,
) -> TheoremVerdict:
    """
    2i Im(Theta) = del delbar omega', checked or solved.

    Args:
        g: Numeric algebra
        m: Metric
        phi_prime: First-order term of the curve
        omega_prime: Candidate derivative of omega^(n-2); solved for when None

    Returns:
        TheoremVerdict with HOLDS/FAILS or SOLVABLE/UNSOLVABLE
    """
    if not g.is_numeric():
        raise SymbolicRankRefused("theorem_check needs Gaussian-rational structure constants")
    if theta is None:
        theta = obstruction_form(g, m, phi_prime)
    target = two_i_imaginary(theta)
    n = g.n
    if omega_prime is not None:
        if omega_prime and omega_prime.bidegree != (n - 2, n - 2):
            raise InvalidStructure(f"omega' must have bidegree ({n - 2},{n - 2})")
        residual = ddbar(g, omega_prime) - target
        return TheoremVerdict(HOLDS if not residual else FAILS, target, omega_prime)
    result = solve_ddbar(g, target, n - 1, n - 1)
    if result.solvable:
        return TheoremVerdict(SOLVABLE, target, result.witness)
    return TheoremVerdict(UNSOLVABLE, target, certificate=result.certificate)


@dataclass
class TaylorCheck:
    """t-coefficient of del_t delbar_t omega_t^(n-2) against the first-order expansion"""

    holds: bool
    t_coefficient: InvariantForm
    expected: InvariantForm

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "t_coefficient": self.t_coefficient.format(),
            "expected": self.expected.format(),
        }


def expected_first_order(
    g: ComplexNilAlgebra, phi_prime: VectorForm01, power: InvariantForm, omega_prime: InvariantForm
) -> InvariantForm:
    """
    del delbar omega' - del iota_phi' del power + delbar iota_conj(phi') delbar power
    + (iota_phi' + iota_conj(phi'))(del delbar power).

    The last term vanishes when the metric is astheno-Kaehler.
    """
    return (
        ddbar(g, omega_prime)
        - del_(g, contract(phi_prime, del_(g, power)))
        + delbar(g, contract_bar(phi_prime, delbar(g, power)))
        + contraction_derivation(phi_prime, ddbar(g, power))
    )


def taylor_consistency_check(
    g: ComplexNilAlgebra,
    m: HermitianMetric,
    curve,
    omega_prime: Optional[InvariantForm] = None,
) -> TaylorCheck:
    """
    Run the deformed operators over first-order jets and compare with the expansion.

    Args:
        g: Algebra (symbolic or numeric)
        m: Metric of the central fiber
        curve: DeformationCurve, or a VectorForm01 taken as phi'(0)
        omega_prime: Derivative of omega^(n-2) at 0; zero when None

    Returns:
        TaylorCheck
    """
    phi_prime = curve.derivative_at_zero() if isinstance(curve, DeformationCurve) else curve
    _check_inputs(g, m, phi_prime)
    domain = g.domain
    power = fundamental_power(m, g.n - 2)
    if omega_prime is None:
        omega_prime = InvariantForm.zero(g.n, domain)
    jets = JetDomain(domain)
    family = jets.family(power, omega_prime)
    phi_jet = jet_vector_form(phi_prime)
    result = ddbar_t(phi_jet, family, g)
    t_coefficient = jets.deriv_part(result)
    expected = expected_first_order(g, phi_prime, power, omega_prime)
    holds = t_coefficient == expected
    if not holds:
        logger.warning(f"Jet expansion mismatch on {g.name or 'algebra'}")
    return TaylorCheck(holds, t_coefficient, expected)


@dataclass
class ObstructionReport:
    """Theta with its imaginary part, verdicts and conditions"""

    theta: InvariantForm
    theta_normalized: InvariantForm
    two_i_im_theta: InvariantForm
    monomial_scalar: Optional[object]
    normalized_monomial_scalar: Optional[object]
    designated_monomial: Optional[Monomial]
    corollary_verdict: CorollaryVerdict
    theorem_verdict: Optional[TheoremVerdict]
    level: str = INVARIANT_LEVEL

    def to_dict(self, domain) -> dict:
        return {
            "theta": self.theta.format(),
            "theta_normalized": self.theta_normalized.format(),
            "two_i_im_theta": self.two_i_im_theta.format(),
            "monomial_scalar": domain.format(self.monomial_scalar) if self.monomial_scalar is not None else None,
            "normalized_monomial_scalar": (
                domain.format(self.normalized_monomial_scalar) if self.normalized_monomial_scalar is not None else None
            ),
            "designated_monomial": self.designated_monomial.text() if self.designated_monomial else None,
            "corollary": self.corollary_verdict.to_dict(domain),
            "theorem": self.theorem_verdict.to_dict(domain) if self.theorem_verdict else None,
            "level": self.level,
        }


def obstruct(g: ComplexNilAlgebra, m: HermitianMetric, phi_prime: VectorForm01) -> ObstructionReport:
    """
    Full obstruction report for a first-order deformation direction.

    theta uses omega^(n-2) itself; theta_normalized uses omega^(n-2)/((n-2)! (i/2)^(n-2)),
    the sum of products of eta^{j|j}.
    monomial_scalar and normalized_monomial_scalar are the coefficients of the
    designated monomial in each.
    """
    theta = obstruction_form(g, m, phi_prime)
    theta_normalized = obstruction_of(g, phi_prime, normalized_power(m, g.n - 2))
    scalar, normalized_scalar, designated = None, None, None
    if len(theta) == 1:
        designated, scalar = theta.sorted_items()[0]
        normalized_scalar = dict(theta_normalized.items())[designated]
    corollary = corollary_check(g, m, phi_prime, theta)
    numeric = g.is_numeric() and all(g.domain.is_constant(c) for _, c in theta.items())
    theorem = theorem_check(g, m, phi_prime, theta=theta) if numeric else None
    return ObstructionReport(
        theta=theta,
        theta_normalized=theta_normalized,
        two_i_im_theta=two_i_imaginary(theta),
        monomial_scalar=scalar,
        normalized_monomial_scalar=normalized_scalar,
        designated_monomial=designated,
        corollary_verdict=corollary,
        theorem_verdict=theorem,
    )
