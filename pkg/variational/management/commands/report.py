import csv
from pathlib import Path

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand

from problems.utils.commands import echo_config, translate_errors
from problems.utils.files import read_json
from variational.constants import TRACE_HEADER
from variational.optimizer import Trace
from variational.utils.exports import render_result_workbook


def load_traces(result, source):
    """Trace files of a result, resolved against the result's directory."""
    traces = {}
    for name in result.get("trace_files", []):
        path = Path(name)
        if not path.is_absolute() and not path.exists():
            path = Path(source).parent / path
        if not path.exists():
            raise ValidationError(
                "Trace file %(path)s is missing.",
                code="missing_trace",
                params={"path": path},
            )
        traces[path.stem] = (path, Trace.read_csv(path))
    return traces


class Command(BaseCommand):
    help = "Render a result JSON and its traces into plot-ready CSV or Excel"

    def add_arguments(self, parser):
        parser.add_argument("--in", dest="source", required=True, help="Result JSON")
        parser.add_argument("-o", "--output", help="Merged trace CSV")
        parser.add_argument("--xlsx", help="Summary and trace workbook")

    def handle(self, *args, **options):
        echo_config(self, options)
        with translate_errors():
            result = read_json(options["source"])
            if not isinstance(result, dict) or "best_cost" not in result:
                raise ValidationError(
                    "%(path)s is not a result file.",
                    code="malformed_result",
                    params={"path": options["source"]},
                )
            traces = load_traces(result, options["source"])

        for path, _ in traces.values():
            self.stdout.write(str(path))

        if options["output"]:
            with open(options["output"], "w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle)
                writer.writerow(["replica"] + TRACE_HEADER)
                for title, (_, trace) in traces.items():
                    for record in trace.records:
                        writer.writerow([title] + record.as_row())
            self.stdout.write(f"Wrote {options['output']}")

        if options["xlsx"]:
            wb = render_result_workbook(
                result, {title: trace for title, (_, trace) in traces.items()}
            )
            Path(options["xlsx"]).parent.mkdir(parents=True, exist_ok=True)
            wb.save(options["xlsx"])
            self.stdout.write(f"Wrote {options['xlsx']}")

        ratio = result.get("approx_ratio")
        self.stdout.write(
            self.style.SUCCESS(
                f"best_cost={result['best_cost']!r} approx_ratio={ratio!r} "
                f"traces={len(traces)}"
            )
        )
