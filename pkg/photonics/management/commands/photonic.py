from pathlib import Path

from django.core.management.base import BaseCommand

from photonics.utils.options import add_photonic_arguments, build_window_cost
from problems.utils.commands import translate_errors
from problems.utils.files import write_json
from variational.enums import EvalKind
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
    help = "Design an energy-saving window stack by minimising its figure of merit"

    def add_arguments(self, parser):
        parser.add_argument("--layers", type=int, required=True)
        add_solver_arguments(parser, default_mode=EvalKind.DECODE)
        add_photonic_arguments(parser)

    def handle(self, *args, **options):
        with translate_errors():
            require_positive(options, "layers", "replicas", "workers", "m", "t")
            cost, problem = build_window_cost(options["layers"], options)
            default_output(options, f"window_{options['layers']}")
            config = build_run_config(cost, options, problem)
            echo_run_config(self, options, config)
            result = execute(self, config, options, resolve_reference(options))

            fom = cost.fn
            output = Path(options["output"])
            stack_path = write_json(
                output.with_name(f"{output.stem}_stack.json"),
                fom.describe(result.best_assignment),
            )
            csv_path = fom.write_transmission_csv(
                result.best_assignment,
                output.with_name(f"{output.stem}_transmission.csv"),
            )

        self.stdout.write(
            self.style.SUCCESS(
                "Best stack: " + " / ".join(result.details.get("materials", []))
            )
        )
        self.stdout.write(f"Wrote {stack_path}")
        self.stdout.write(f"Wrote {csv_path}")
