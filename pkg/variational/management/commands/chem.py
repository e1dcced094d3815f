from functools import partial
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand

from problems.enums import ProblemFamily
from problems.management.commands.brute import read_text
from problems.oracle import dense_min_eigenvalue
from problems.pauli import parse_pauli_file
from problems.utils.commands import translate_errors
from variational.evaluator import PauliCost
from variational.utils.options import (
    add_solver_arguments,
    build_run_config,
    default_output,
    echo_run_config,
    execute,
    require_positive,
    resolve_reference,
)


class Command(BaseCommand):
    help = "Minimise the product-state energy of a Pauli-sum Hamiltonian"

    def add_arguments(self, parser):
        parser.add_argument("--hamiltonian", required=True, help="Pauli-sum text file")
        add_solver_arguments(parser)

    def handle(self, *args, **options):
        with translate_errors():
            require_positive(options, "replicas", "workers", "m", "t")
            hamiltonian = parse_pauli_file(read_text(options["hamiltonian"]))
            cost = PauliCost(hamiltonian)
            problem = {
                "source": options["hamiltonian"],
                "family": str(ProblemFamily.CHEMISTRY),
                "n": hamiltonian.n,
                "terms": len(hamiltonian.terms),
                "diagonal": hamiltonian.is_diagonal,
            }
            default_output(options, Path(options["hamiltonian"]).stem)
            config = build_run_config(cost, options, problem)
            echo_run_config(self, options, config)

            oracle = None
            if hamiltonian.n <= settings.DVQOA_EIGEN_QUBIT_CAP:
                oracle = partial(
                    dense_min_eigenvalue, hamiltonian, settings.DVQOA_EIGEN_QUBIT_CAP
                )
            else:
                self.stdout.write(
                    self.style.WARNING(
                        f"{hamiltonian.n} qubits exceed the dense eigensolver cap; "
                        "no reference energy."
                    )
                )
            reference = resolve_reference(options, oracle)
            result = execute(self, config, options, reference)
            self.stdout.write(f"energy={result.best_cost!r}")
