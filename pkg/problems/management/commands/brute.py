from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from problems.oracle import (
    OracleResult,
    brute_force_poly,
    brute_force_tsp,
    dense_min_eigenvalue,
)
from problems.pauli import parse_pauli_file
from problems.utils.commands import echo_config, translate_errors
from problems.utils.files import load_problem, write_json


def read_text(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CommandError(str(exc), returncode=2) from exc


class Command(BaseCommand):
    help = "Exact reference: brute force a problem or TSP, or diagonalise a Hamiltonian"

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--problem", help="Problem JSON")
        source.add_argument("--tsp", help="TSP JSON (permutation oracle)")
        source.add_argument("--hamiltonian", help="Pauli-sum text file")
        parser.add_argument("--workers", type=int, default=settings.DVQOA_WORKERS)
        parser.add_argument("-o", "--output", help="Result JSON path")

    def handle(self, *args, **options):
        if options["workers"] < 1:
            raise CommandError("--workers must be >= 1", returncode=2)
        echo_config(
            self,
            options,
            brute_force_cap=settings.DVQOA_BRUTE_FORCE_CAP,
            tsp_city_cap=settings.DVQOA_TSP_CITY_CAP,
            eigen_qubit_cap=settings.DVQOA_EIGEN_QUBIT_CAP,
        )
        with translate_errors():
            result = self._solve(options)

        self.stdout.write(
            self.style.SUCCESS(
                f"optimum={result.optimum!r} enumerated={result.enumerated} "
                f"wall_time_s={result.wall_time_s:.3f} "
                f"total_core_time_s={result.total_core_time_s:.3f}"
            )
        )
        if options["output"]:
            path = write_json(options["output"], result.to_dict())
            self.stdout.write(f"Wrote {path}")

    def _solve(self, options):
        if options["hamiltonian"]:
            hamiltonian = parse_pauli_file(read_text(options["hamiltonian"]))
            value = dense_min_eigenvalue(
                hamiltonian, cap=settings.DVQOA_EIGEN_QUBIT_CAP
            )
            return OracleResult(
                optimum=value, optimizer=(), enumerated=2**hamiltonian.n
            )

        bundle = load_problem(options["tsp"] or options["problem"])
        if bundle.tsp is not None:
            result = brute_force_tsp(bundle.tsp, cap=settings.DVQOA_TSP_CITY_CAP)
            result.extra["route"] = list(result.optimizer)
            return result
        return brute_force_poly(
            bundle.polynomial,
            workers=options["workers"],
            cap=settings.DVQOA_BRUTE_FORCE_CAP,
        )
