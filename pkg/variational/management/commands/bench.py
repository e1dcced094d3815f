from django.conf import settings
from django.core.management.base import BaseCommand

from problems.utils.commands import echo_config, translate_errors
from variational.bench import (
    SUITES,
    bench,
    doubling_ratio,
    fit_rows,
    parse_sizes,
    write_rows,
)
from variational.optimizer import StopPolicy


class Command(BaseCommand):
    help = "Run a scaling benchmark suite and emit plot-ready CSV rows"

    def add_arguments(self, parser):
        parser.add_argument("suite", choices=sorted(SUITES))
        parser.add_argument(
            "--n",
            dest="sizes",
            required=True,
            help="Sizes (or worker counts, or m/t values): 8,16,32 or 8..16",
        )
        parser.add_argument("--repeats", type=int, default=3)
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--workers", type=int, default=settings.DVQOA_WORKERS)
        parser.add_argument("--replicas", type=int, default=4)
        parser.add_argument("--max-iters", type=int, default=StopPolicy.max_iters)
        parser.add_argument(
            "--plateau-window", type=int, default=StopPolicy.plateau_window
        )
        parser.add_argument("-o", "--output", help="CSV path (stdout when omitted)")

    def handle(self, *args, **options):
        with translate_errors():
            sizes = parse_sizes(options["sizes"])
            policy = StopPolicy(
                max_iters=options["max_iters"],
                plateau_window=options["plateau_window"],
            )
            echo_config(self, options, sizes=sizes, policy=policy.to_dict())
            rows = bench(
                options["suite"],
                sizes,
                repeats=options["repeats"],
                seed=options["seed"],
                workers=options["workers"],
                replicas=options["replicas"],
                policy=policy,
                group_cap=settings.DVQOA_GROUP_CAP,
            )

        if options["output"]:
            with open(options["output"], "w", newline="", encoding="utf-8") as handle:
                write_rows(rows, handle)
            self.stdout.write(f"Wrote {len(rows)} rows to {options['output']}")
        else:
            write_rows(rows, self.stdout)

        for fit in fit_rows(rows):
            self.stdout.write(str(fit))
        ratio = doubling_ratio(rows)
        if ratio is not None:
            self.stdout.write(f"brute force time ratio per extra variable: {ratio:.3f}")
        self.stdout.write(self.style.SUCCESS(f"{options['suite']}: {len(rows)} rows"))
