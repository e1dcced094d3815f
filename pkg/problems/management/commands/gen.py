from django.core.management.base import BaseCommand, CommandError

from problems.enums import ProblemFamily
from problems.generators import gen_higher_order, gen_maxcut, gen_qubo
from problems.polynomial import interaction_count
from problems.tsp import encode_tsp, gen_tsp
from problems.utils.commands import echo_config, translate_errors
from problems.utils.files import ProblemBundle, write_json

KINDS = ["qubo", "maxcut", "tsp", "hobo", "nary"]


class Command(BaseCommand):
    help = "Generate a random problem instance and write it as JSON"

    def add_arguments(self, parser):
        parser.add_argument("kind", choices=KINDS)
        parser.add_argument("--n", type=int, help="Variable / node count")
        parser.add_argument("--k", type=int, default=2, help="Interaction order")
        parser.add_argument("--N", dest="arity", type=int, default=2, help="Arity")
        parser.add_argument("--cities", type=int, help="City count (tsp)")
        parser.add_argument("--penalty", type=float, default=100.0)
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("-o", "--output", help="Output JSON path")

    def handle(self, *args, **options):
        kind = options["kind"]
        options["output"] = options["output"] or f"{kind}_{options['seed']}.json"
        echo_config(self, options)

        with translate_errors():
            bundle = self._generate(kind, options)

        path = write_json(options["output"], bundle.to_dict())
        poly = bundle.polynomial
        self.stdout.write(
            self.style.SUCCESS(
                f"Wrote {path}: n={poly.n} N={poly.arity} k={poly.max_order} "
                f"terms={poly.term_count} "
                f"T(n,k)={interaction_count(poly.n, poly.max_order)}"
            )
        )
        if bundle.graph is not None:
            self.stdout.write(f"edges={len(bundle.graph.edges)}")

    def _generate(self, kind, options):
        n, seed = options["n"], options["seed"]
        if kind == "tsp":
            if not options["cities"]:
                raise CommandError("tsp needs --cities", returncode=2)
            instance = gen_tsp(options["cities"], seed, penalty=options["penalty"])
            return ProblemBundle(ProblemFamily.TSP, encode_tsp(instance), tsp=instance)
        if not n:
            raise CommandError(f"{kind} needs --n", returncode=2)
        if kind == "qubo":
            return ProblemBundle(ProblemFamily.QUBO, gen_qubo(n, seed))
        if kind == "maxcut":
            graph, poly = gen_maxcut(n, seed)
            return ProblemBundle(ProblemFamily.MAXCUT, poly, graph=graph)
        if kind == "hobo":
            return ProblemBundle(
                ProblemFamily.HIGHER_ORDER, gen_higher_order(n, options["k"], 2, seed)
            )
        if options["arity"] < 3:
            raise CommandError("nary needs --N >= 3", returncode=2)
        return ProblemBundle(
            ProblemFamily.NARY,
            gen_higher_order(n, options["k"], options["arity"], seed),
        )
