"""Solver flags shared by the solve, chem and photonic commands."""
import logging
from pathlib import Path

from django.conf import settings
from django.core.exceptions import ValidationError

from problems.enums import ReferenceSource
from problems.rng import sequence_fingerprint, spawn_sequences
from problems.utils.commands import echo_config
from problems.utils.files import load_reference, write_json

from ..ansatz import AnsatzConfig, default_hyperparameters
from ..constants import DEFAULT_SHOTS
from ..enums import EvalKind, GateSet, OptimizerMethod
from ..evaluator import EvalMode, PartitionPlan
from ..models import RunRecord
from ..optimizer import StopPolicy
from ..runner import RunConfig, run

logger = logging.getLogger(__name__)

# Replica seed words are echoed in full up to this many replicas.
_ECHO_SEED_LIMIT = 64


def add_solver_arguments(parser, default_mode=None):
    parser.add_argument("--m", type=int, help="Layers per repeat")
    parser.add_argument("--t", type=int, help="Repeats")
    parser.add_argument("--gates", choices=GateSet.values, default=GateSet.RY)
    parser.add_argument("--mode", choices=EvalKind.values, default=default_mode)
    parser.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    parser.add_argument("--replicas", type=int, default=settings.DVQOA_REPLICAS)
    parser.add_argument("--workers", type=int, default=settings.DVQOA_WORKERS)
    parser.add_argument(
        "--partitions", help="Group count, or comma-separated group sizes"
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-iters", type=int, default=StopPolicy.max_iters)
    parser.add_argument(
        "--plateau-window", type=int, default=StopPolicy.plateau_window
    )
    parser.add_argument(
        "--plateau-rel-change", type=float, default=StopPolicy.plateau_rel_change
    )
    parser.add_argument("--abs-tol", type=float, default=StopPolicy.abs_tol)
    parser.add_argument(
        "--method", choices=OptimizerMethod.values, default=OptimizerMethod.NELDER_MEAD
    )
    parser.add_argument("--reference", help="Oracle result or reference JSON")
    parser.add_argument("-o", "--output", help="Result JSON path")
    parser.add_argument("--trace-dir", help="Directory for per-replica trace CSVs")
    parser.add_argument(
        "--save", action="store_true", help="Store the run in the run history"
    )


def default_output(options, name):
    output = options["output"] or Path(settings.DVQOA_OUTPUT_DIR) / (
        f"{name}_seed{options['seed']}.json"
    )
    options["output"] = str(output)
    if not options["trace_dir"]:
        path = Path(options["output"])
        options["trace_dir"] = str(path.with_name(f"{path.stem}_traces"))
    return options


def build_run_config(cost, options, problem, cities=None):
    """Materialise every default into a :class:`RunConfig`."""
    m, t = default_hyperparameters(cost.n, cost.arity, cost.family, cities)
    ansatz = AnsatzConfig(
        n=cost.n,
        m=options["m"] or m,
        t=options["t"] or t,
        gate_set=options["gates"],
        arity=cost.arity,
    )
    kind = options["mode"] or cost.default_mode.kind
    mode = EvalMode(kind, options["shots"] if kind == EvalKind.SHOTS else None)
    plan = None
    if options["partitions"]:
        plan = PartitionPlan.parse(options["partitions"], cost.n)
    policy = StopPolicy(
        max_iters=options["max_iters"],
        plateau_window=options["plateau_window"],
        plateau_rel_change=options["plateau_rel_change"],
        abs_tol=options["abs_tol"],
        method=options["method"],
    )
    return RunConfig(
        cost=cost,
        ansatz=ansatz,
        mode=mode,
        policy=policy,
        replicas=options["replicas"],
        workers=options["workers"],
        plan=plan,
        seed=options["seed"],
        group_cap=settings.DVQOA_GROUP_CAP,
        problem=problem,
        trace_dir=options["trace_dir"],
    )


def echo_run_config(command, options, config):
    seeds = [
        sequence_fingerprint(s)
        for s in spawn_sequences(config.seed, min(config.replicas, _ECHO_SEED_LIMIT))
    ]
    return echo_config(
        command,
        options,
        resolved=config.to_dict(),
        replica_seed_words=seeds,
    )


def resolve_reference(options, oracle=None):
    """``(value, source)`` from ``--reference`` or the given oracle callable."""
    if options.get("reference"):
        return load_reference(options["reference"]), ReferenceSource.EXTERNAL
    if oracle is not None:
        return oracle(), ReferenceSource.ORACLE
    return None, ReferenceSource.NONE


def execute(command, config, options, reference=(None, ReferenceSource.NONE)):
    """Run, attach the reference, write the result JSON and report."""
    result = run(config).with_reference(*reference)
    write_json(options["output"], result.to_dict())

    command.stdout.write(
        command.style.SUCCESS(
            f"best_cost={result.best_cost!r} found={result.found_value!r} "
            f"replicas_ok={len(result.replicas) - len(result.errors)}/"
            f"{len(result.replicas)} wall_time_s={result.wall_time_s:.3f}"
        )
    )
    if result.reference is not None:
        if result.ratio.defined:
            outcome = f"approx_ratio={result.ratio.ratio!r}"
        else:
            outcome = f"ratio undefined, gap={result.ratio.gap!r}"
        command.stdout.write(f"reference={result.reference!r} {outcome}")
    for error in result.errors:
        command.stdout.write(
            command.style.WARNING(f"replica {error['replica']}: {error['error']}")
        )
    command.stdout.write(f"Wrote {options['output']}")

    if options.get("save"):
        record = RunRecord.from_result(
            result,
            command=command_name(command),
            workers=config.workers,
            output_path=options["output"],
        )
        command.stdout.write(f"Saved run #{record.pk}")
    return result


def command_name(command):
    return command.__module__.rsplit(".", 1)[-1]


def require_positive(options, *names):
    for name in names:
        if options.get(name) is not None and options[name] < 1:
            raise ValidationError(
                "--%(flag)s must be >= 1.",
                code="invalid_flag",
                params={"flag": name.replace("_", "-")},
            )
