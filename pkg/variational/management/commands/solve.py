from functools import partial
from pathlib import Path

from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand
from django.utils.module_loading import import_string

from photonics.utils.options import add_photonic_arguments, build_window_cost
from problems.enums import ProblemFamily
from problems.oracle import brute_force_poly, brute_force_tsp
from problems.utils.commands import translate_errors
from problems.utils.files import load_problem
from variational.evaluator import BlackBoxCost, PolynomialCost, TspCost
from variational.utils.options import (
    add_solver_arguments,
    build_run_config,
    default_output,
    echo_run_config,
    execute,
    require_positive,
    resolve_reference,
)


def load_callable(path):
    """``package.module:callable`` or ``package.module.callable``."""
    try:
        fn = import_string(path.replace(":", "."))
    except ImportError as exc:
        raise ValidationError(
            "Cannot import cost %(path)s: %(error)s",
            code="bad_cost",
            params={"path": path, "error": exc},
        ) from exc
    if not callable(fn):
        raise ValidationError(
            "%(path)s is not callable.", code="bad_cost", params={"path": path}
        )
    return fn


def poly_optimum(polynomial, workers):
    return brute_force_poly(
        polynomial, workers=workers, cap=settings.DVQOA_BRUTE_FORCE_CAP
    ).optimum


def tsp_optimum(instance):
    return brute_force_tsp(instance, cap=settings.DVQOA_TSP_CITY_CAP).optimum


def problem_summary(bundle, source):
    poly = bundle.polynomial
    summary = {
        "source": str(source),
        "family": str(bundle.family),
        "n": poly.n,
        "N": poly.arity,
        "k": poly.max_order,
        "terms": poly.term_count,
    }
    if bundle.tsp is not None:
        summary["cities"] = bundle.tsp.size
    return summary


class Command(BaseCommand):
    help = "Minimise a problem with the entanglement-free variational optimiser"

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--problem", help="Problem JSON (gen output)")
        source.add_argument(
            "--cost", help="Black-box cost callable, package.module:callable"
        )
        source.add_argument(
            "--photonic", type=int, metavar="LAYERS", help="Window design layers"
        )
        parser.add_argument("--n", type=int, help="Variable count (--cost)")
        parser.add_argument("--N", dest="arity", type=int, default=2)
        parser.add_argument(
            "--oracle",
            action="store_true",
            help="Brute force the reference before solving",
        )
        add_solver_arguments(parser)
        add_photonic_arguments(parser)

    def handle(self, *args, **options):
        with translate_errors():
            require_positive(options, "replicas", "workers", "m", "t", "shots")
            cost, problem, oracle, cities = self._build_cost(options)
            name = problem["family"]
            if options["problem"]:
                name = Path(options["problem"]).stem
            default_output(options, name)
            config = build_run_config(cost, options, problem, cities)
            echo_run_config(self, options, config)
            reference = resolve_reference(options, oracle)
            execute(self, config, options, reference)

    def _build_cost(self, options):
        if options["photonic"] is not None:
            cost, problem = build_window_cost(options["photonic"], options)
            return cost, problem, None, None

        if options["cost"]:
            if not options["n"]:
                raise ValidationError("--cost needs --n.", code="missing_flag")
            fn = load_callable(options["cost"])
            cost = BlackBoxCost(fn, options["n"], options["arity"])
            problem = {
                "source": options["cost"],
                "family": str(ProblemFamily.BLACKBOX),
                "n": options["n"],
                "N": options["arity"],
            }
            return cost, problem, None, None

        bundle = load_problem(options["problem"])
        problem = problem_summary(bundle, options["problem"])
        oracle = None
        if bundle.tsp is not None:
            cost = TspCost(bundle.tsp, bundle.polynomial)
            if options["oracle"]:
                oracle = partial(tsp_optimum, bundle.tsp)
            return cost, problem, oracle, bundle.tsp.size

        cost = PolynomialCost(bundle.polynomial, bundle.family, bundle.graph)
        if options["oracle"]:
            oracle = partial(poly_optimum, bundle.polynomial, options["workers"])
        return cost, problem, oracle, None
