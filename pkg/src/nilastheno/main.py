"""
Command-line session driver
Loads an algebra with its metric and deformation data, runs one command and prints a deterministic report
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional

from .algebra import classify, validate_algebra
from .cohomology import PIVOT_METHODS, bc_class_vanishes, bc_space, bc_table, harmonicity_conditions, is_bc_harmonic
from .config import (
    COMMANDS,
    SessionConfig,
    load_defaults,
    parse_assignment,
    parse_bidegree,
    read_data_file,
)
from .contraction import VectorForm01
from .deformation import DeformationCurve, integrability_residual, pullback_structure, residual_polynomials
from .errors import InvalidStructure, NilAsthenoError
from .exterior import InvariantForm, parse_form
from .fixtures import FixtureBundle, fixture_bundle, list_fixtures, search_ex2_instances
from .metrics import MODES, HermitianMetric, check_special_metric, forced_vanishing
from .obstruction import obstruct, taylor_consistency_check, theorem_check
from .report_generator import FORMATS, ReportGenerator

logger = logging.getLogger(__name__)


class Session:
    """Parsed inputs of one run"""

    def __init__(self, bundle: FixtureBundle, curve: Optional[DeformationCurve], config: SessionConfig):
        self.bundle = bundle
        self.curve = curve
        self.config = config
        self.assignments: Dict[str, str] = {**bundle.assignments, **config.assignments}

    @classmethod
    def load(cls, config: SessionConfig) -> "Session":
        """
        Read the algebra (file or fixture) and the optional metric, curve and vector-form files

        Args:
            config: Session configuration

        Returns:
            Session
        """
        if config.fixture:
            bundle = fixture_bundle(config.fixture)
            source = config.fixture
        elif config.algebra:
            data = read_data_file(config.algebra)
            bundle = FixtureBundle.from_dict(data if "algebra" in data else {"algebra": data}, config.algebra)
            source = config.algebra
        else:
            raise InvalidStructure(f"Command '{config.command}' needs --algebra or --fixture")
        domain, n = bundle.domain, bundle.algebra.n
        if config.metric:
            bundle.metric = HermitianMetric.from_dict(read_data_file(config.metric), n, domain)
        if config.vector_form:
            bundle.vector_form = VectorForm01.from_dict(read_data_file(config.vector_form), n, domain)
        curve = None
        if config.curve:
            data = read_data_file(config.curve)
            phi = VectorForm01.from_dict(data, n, domain)
            curve = DeformationCurve(bundle.algebra, phi, data.get("parameter", "t"))
        logger.info(f"Loaded {source}: n={n}, parameters {list(domain.params)}")
        return cls(bundle, curve, config)

    def specialized(self) -> FixtureBundle:
        return self.bundle.specialized(self.assignments)

    def first_order(self, bundle: FixtureBundle) -> VectorForm01:
        """phi'(0): from the curve when one is given, else the vector form itself."""
        if self.curve is not None:
            phi_prime = self.curve.derivative_at_zero()
            return phi_prime.map_coefficients(lambda c: bundle.domain.substitute(c, self.assignments))
        if bundle.vector_form is None:
            raise InvalidStructure(f"Command '{self.config.command}' needs --curve or --vector-form")
        return bundle.vector_form

    def parse_form(self, text: Optional[str], what: str, bundle: FixtureBundle) -> InvariantForm:
        if not text:
            raise InvalidStructure(f"Command '{self.config.command}' needs --{what}")
        form = parse_form(text, bundle.algebra.n, bundle.domain)
        return form.map_coefficients(lambda c: bundle.domain.substitute(c, self.assignments))


def _formatted(domain, values: List[object]) -> List[str]:
    return [domain.format(value) for value in values]


def _cmd_validate(session: Session) -> dict:
    bundle = session.specialized()
    return validate_algebra(bundle.algebra).to_dict()


def _cmd_classify(session: Session) -> dict:
    bundle = session.specialized()
    return classify(bundle.algebra).to_dict(bundle.domain)


def _cmd_metric_check(session: Session) -> dict:
    bundle = session.specialized()
    result = check_special_metric(bundle.algebra, bundle.metric, session.config.mode)
    report = result.to_dict(bundle.domain)
    forced = {}
    for condition in result.independent:
        names = forced_vanishing(bundle.domain, condition)
        if names:
            forced[bundle.domain.format(condition)] = names
    report["forced_vanishing"] = forced
    return report


def _cmd_integrability(session: Session) -> dict:
    bundle = session.specialized()
    family = session.curve if session.curve is not None else bundle.vector_form
    if family is None:
        raise InvalidStructure("integrability needs --curve or --vector-form")
    residuals = integrability_residual(family, bundle.algebra)
    return {
        "integrable": not residuals,
        "residuals": {str(j): form.format() for j, form in residuals},
        "polynomials": _formatted(bundle.domain, residual_polynomials(family, bundle.algebra)),
    }


def _cmd_bc(session: Session) -> dict:
    bundle = session.specialized()
    config = session.config
    if config.bidegree is not None:
        return bc_space(bundle.algebra, *config.bidegree, method=config.pivot_method).to_dict()
    table = bc_table(bundle.algebra, config.pivot_method, config.progress)
    return {"dimensions": {f"{p},{q}": dim for (p, q), dim in sorted(table.items())}}


def _cmd_bc_class(session: Session) -> dict:
    bundle = session.specialized()
    alpha = session.parse_form(session.config.form, "form", bundle)
    verdict = bc_class_vanishes(bundle.algebra, alpha, session.config.pivot_method)
    return {"form": alpha.format(), **verdict.to_dict(bundle.domain)}


def _cmd_harmonic(session: Session) -> dict:
    bundle = session.specialized()
    alpha = session.parse_form(session.config.form, "form", bundle)
    return {
        "form": alpha.format(),
        "harmonic": is_bc_harmonic(bundle.algebra, bundle.metric, alpha),
        "conditions": _formatted(bundle.domain, harmonicity_conditions(bundle.algebra, bundle.metric, alpha)),
    }


def _cmd_obstruct(session: Session) -> dict:
    bundle = session.specialized()
    report = obstruct(bundle.algebra, bundle.metric, session.first_order(bundle))
    return report.to_dict(bundle.domain)


def _cmd_theorem_check(session: Session) -> dict:
    bundle = session.specialized()
    omega_prime = None
    if session.config.omega_prime:
        omega_prime = session.parse_form(session.config.omega_prime, "omega-prime", bundle)
    verdict = theorem_check(bundle.algebra, bundle.metric, session.first_order(bundle), omega_prime)
    return verdict.to_dict(bundle.domain)


def _cmd_jet_check(session: Session) -> dict:
    bundle = session.specialized()
    omega_prime = None
    if session.config.omega_prime:
        omega_prime = session.parse_form(session.config.omega_prime, "omega-prime", bundle)
    return taylor_consistency_check(bundle.algebra, bundle.metric, session.first_order(bundle), omega_prime).to_dict()


def _cmd_pullback(session: Session) -> dict:
    bundle = session.bundle
    family = session.curve if session.curve is not None else bundle.vector_form
    if family is None:
        raise InvalidStructure("pullback needs --curve or --vector-form")
    deformed = pullback_structure(family, session.assignments, bundle.algebra)
    return {
        "point": dict(sorted(session.assignments.items())),
        "algebra": deformed.to_dict(),
        "validation": validate_algebra(deformed).to_dict(),
    }


def _cmd_search(session: Session) -> dict:
    config = session.config
    hits = search_ex2_instances(config.search_bound, config.search_limit, config.progress)
    template = fixture_bundle("ex2_identified")
    verified = []
    for hit in hits:
        instance = template.specialized({name: str(value) for name, value in hit.items()})
        result = check_special_metric(instance.algebra, instance.metric, "astheno")
        verified.append({"values": hit, "astheno": result.satisfied})
    return {"bound": config.search_bound, "instances": verified}


HANDLERS = {
    "validate": _cmd_validate,
    "classify": _cmd_classify,
    "metric-check": _cmd_metric_check,
    "integrability": _cmd_integrability,
    "bc": _cmd_bc,
    "bc-class": _cmd_bc_class,
    "harmonic": _cmd_harmonic,
    "obstruct": _cmd_obstruct,
    "theorem-check": _cmd_theorem_check,
    "jet-check": _cmd_jet_check,
    "pullback": _cmd_pullback,
    "search": _cmd_search,
}


def run(config: SessionConfig) -> dict:
    """
    Run one command

    Args:
        config: Session configuration

    Returns:
        Report mapping with keys command, source and result
    """
    if config.command == "fixtures":
        return {"command": "fixtures", "source": "", "result": list_fixtures()}
    if config.pivot_method not in PIVOT_METHODS:
        raise InvalidStructure(f"Unknown elimination method '{config.pivot_method}'")
    if config.command == "search":
        session = Session(fixture_bundle("ex2_identified"), None, config)
    else:
        session = Session.load(config)
    result = HANDLERS[config.command](session)
    source = config.fixture or config.algebra or ""
    return {"command": config.command, "source": source, "result": result}


def build_parser(defaults: dict) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nilastheno",
        description="Exact invariant complex geometry on nilmanifolds: structure checks, special metrics, "
        "Bott-Chern cohomology and deformation obstructions.",
    )
    parser.add_argument("command", choices=COMMANDS)
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--algebra", help="Algebra file (JSON or YAML); may also carry metric and vector form")
    source.add_argument("--fixture", help="Name of a shipped fixture")
    parser.add_argument("--metric", help="Metric file")
    parser.add_argument("--curve", help="Curve file with entries in the parameter t")
    parser.add_argument("--vector-form", dest="vector_form", help="Vector-form file taken as phi'(0)")
    parser.add_argument("--set", dest="assignments", action="append", default=[], metavar="NAME=VALUE",
                        help="Parameter substitution, repeatable")
    parser.add_argument("--mode", choices=MODES, default="astheno")
    parser.add_argument("--bidegree", help="p,q for the bc command; full table when omitted")
    parser.add_argument("--form", help="Form text, e.g. 'e[1,2,3|1,2,3]'")
    parser.add_argument("--omega-prime", dest="omega_prime", help="Derivative of omega^(n-2) at 0")
    parser.add_argument("--format", dest="output_format", choices=FORMATS, default=defaults["output_format"])
    parser.add_argument("--method", dest="pivot_method", choices=PIVOT_METHODS, default=defaults["pivot_method"])
    parser.add_argument("--progress", action="store_true", default=defaults["progress"])
    parser.add_argument("--bound", type=int, default=defaults["search_bound"])
    parser.add_argument("--limit", type=int, default=defaults["search_limit"])
    parser.add_argument("--log-level", dest="log_level", default=defaults["log_level"])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    defaults = load_defaults()
    args = build_parser(defaults).parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING))
    try:
        config = SessionConfig(
            command=args.command,
            algebra=args.algebra,
            fixture=args.fixture,
            metric=args.metric,
            curve=args.curve,
            vector_form=args.vector_form,
            output_format=args.output_format,
            assignments=parse_assignment(args.assignments),
            mode=args.mode,
            bidegree=parse_bidegree(args.bidegree),
            form=args.form,
            omega_prime=args.omega_prime,
            pivot_method=args.pivot_method,
            progress=args.progress,
            search_bound=args.bound,
            search_limit=args.limit,
        )
        report = run(config)
    except NilAsthenoError as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    sys.stdout.write(ReportGenerator(config.output_format).generate(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
