"""
Best-of-R replica execution.

Replica ``i`` seeds its own generator from the ``i``-th child of the run
seed, draws its start angles, runs :func:`variational.optimizer.minimize`
and reports its best decoded cost. Replicas share nothing and are reduced
in index order, so a :class:`RunResult` (timings aside) depends only on the
problem, the configuration and the seed, never on the worker count.
"""
import logging
import time
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

from django.core.exceptions import ValidationError
from joblib import Parallel, delayed

from problems.enums import ProblemFamily, ReferenceSource
from problems.rng import rng_from_sequence, sequence_fingerprint, spawn_sequences

from .ansatz import AnsatzConfig
from .constants import DEFAULT_GROUP_CAP, DEFAULT_REPLICAS, RATIO_ZERO
from .enums import EvalKind
from .evaluator import EvalMode, PartitionPlan
from .exceptions import DvqoaError, RunError
from .optimizer import MinimizeResult, StopPolicy, Trace, minimize

logger = logging.getLogger(__name__)


@dataclass
class RunConfig:
    cost: object
    ansatz: AnsatzConfig
    mode: EvalMode = None
    policy: StopPolicy = field(default_factory=StopPolicy)
    replicas: int = DEFAULT_REPLICAS
    workers: int = 1
    plan: PartitionPlan = None
    seed: int = 0
    group_cap: int = DEFAULT_GROUP_CAP
    problem: dict = field(default_factory=dict)
    trace_dir: str = None

    def __post_init__(self):
        if self.mode is None:
            self.mode = self.cost.default_mode
        if int(self.replicas) < 1:
            raise ValidationError(
                "replicas must be >= 1 (got %(value)s).",
                code="invalid_replicas",
                params={"value": self.replicas},
            )
        if int(self.workers) < 1:
            raise ValidationError(
                "workers must be >= 1 (got %(value)s).",
                code="invalid_workers",
                params={"value": self.workers},
            )
        if (self.cost.n, self.cost.arity) != (self.ansatz.n, self.ansatz.arity):
            raise ValidationError(
                "Ansatz (n=%(an)s, N=%(aN)s) does not match the problem "
                "(n=%(pn)s, N=%(pN)s).",
                code="dimension_mismatch",
                params={
                    "an": self.ansatz.n,
                    "aN": self.ansatz.arity,
                    "pn": self.cost.n,
                    "pN": self.cost.arity,
                },
            )
        if self.plan is not None:
            self.plan.check(self.ansatz.n)

    def to_dict(self):
        """Result-relevant configuration; the worker count is left out."""
        data = self.ansatz.to_dict()
        data.update(
            {
                "k": self.cost.max_order,
                "mode": str(self.mode),
                "partitions": list(self.plan.sizes) if self.plan else None,
                "replicas": self.replicas,
                "seed": self.seed,
                "policy": self.policy.to_dict(),
            }
        )
        return data


@dataclass
class ReplicaResult:
    index: int
    fingerprint: int
    best_cost: float = None
    best_assignment: tuple = None
    final_objective: float = None
    evaluations: int = 0
    stop_reason: str = None
    trace: Trace = None
    error: str = None

    @property
    def ok(self):
        return self.error is None


def _refine(first, objective, policy):
    """Continue from ``first.x`` on ``objective`` within the remaining budget."""
    second = minimize(objective, first.x, policy)
    best = first.best_evaluation
    if best is None or second.best_decoded[0] < first.best_decoded[0]:
        best = second.best_evaluation
    return MinimizeResult(
        x=second.x,
        fun=second.fun,
        trace=Trace().extend(first.trace).extend(second.trace),
        stop_reason=second.stop_reason,
        evaluations=first.evaluations + second.evaluations,
        best_evaluation=best,
    )


def run_replica(cost, ansatz, mode, policy, plan, group_cap, index, sequence):
    """One independent optimisation from the ``index``-th child seed."""
    fingerprint = sequence_fingerprint(sequence)
    rng = rng_from_sequence(sequence)
    theta0 = ansatz.random_parameters(rng)
    logger.debug("Replica %s started (seed word %s)", index, fingerprint)

    def objective(theta):
        return cost.evaluate(ansatz, theta, mode, rng, plan, group_cap)

    try:
        result = minimize(objective, theta0, policy)
        refine = getattr(cost, "refine_mode", None)
        remaining = policy.max_iters - result.evaluations
        if mode.kind == EvalKind.EXPECTATION and refine is not None and remaining:
            result = _refine(
                result,
                lambda theta: cost.evaluate(
                    ansatz, theta, refine, rng, plan, group_cap
                ),
                replace(policy, max_iters=remaining),
            )
    except DvqoaError as exc:
        logger.warning("Replica %s aborted: %s", index, exc)
        return ReplicaResult(index, fingerprint, error=str(exc))

    value, assignment = result.best_decoded
    logger.debug(
        "Replica %s finished: %s after %s evaluations, best %r",
        index, result.stop_reason, result.evaluations, value,
    )
    return ReplicaResult(
        index=index,
        fingerprint=fingerprint,
        best_cost=value,
        best_assignment=assignment,
        final_objective=result.fun,
        evaluations=result.evaluations,
        stop_reason=str(result.stop_reason),
        trace=result.trace,
    )


@dataclass(frozen=True)
class RatioOutcome:
    ratio: float = None
    gap: float = None

    @property
    def defined(self):
        return self.ratio is not None


def approximation_ratio(found, reference, family):
    """
    ``found / reference`` for minimisation families and
    ``reference / found`` for tour lengths. A reference of (near) zero
    leaves the ratio undefined and reports the absolute gap instead.
    """
    if reference is None:
        raise ValidationError(
            "An approximation ratio needs a reference value.",
            code="missing_reference",
        )
    gap = abs(found - reference)
    if family == ProblemFamily.TSP:
        if abs(found) < RATIO_ZERO or abs(reference) < RATIO_ZERO:
            return RatioOutcome(gap=gap)
        return RatioOutcome(ratio=reference / found, gap=gap)
    if abs(reference) < RATIO_ZERO:
        return RatioOutcome(gap=gap)
    return RatioOutcome(ratio=found / reference, gap=gap)


@dataclass
class RunResult:
    config: RunConfig
    replicas: list
    best_assignment: tuple
    best_cost: float
    found_value: float
    reference: float = None
    reference_source: str = ReferenceSource.NONE
    ratio: RatioOutcome = field(default_factory=RatioOutcome)
    wall_time_s: float = 0.0
    trace_files: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def approx_ratio(self):
        return self.ratio.ratio

    @property
    def stop_reasons(self):
        counts = Counter(r.stop_reason for r in self.replicas if r.ok)
        return dict(sorted(counts.items()))

    @property
    def errors(self):
        return [
            {"replica": r.index, "error": r.error} for r in self.replicas if not r.ok
        ]

    def with_reference(self, reference, source):
        self.reference = reference
        self.reference_source = ReferenceSource(source)
        if reference is None:
            self.ratio = RatioOutcome()
        else:
            self.ratio = approximation_ratio(
                self.found_value, reference, self.config.cost.family
            )
        return self

    def to_dict(self):
        ok = [r for r in self.replicas if r.ok]
        return {
            "problem": self.config.problem,
            "config": self.config.to_dict(),
            "best_assignment": list(self.best_assignment),
            "best_cost": self.best_cost,
            "found_value": self.found_value,
            "reference": self.reference,
            "reference_source": str(self.reference_source),
            "approx_ratio": self.ratio.ratio,
            "gap": self.ratio.gap,
            "stop_reasons": self.stop_reasons,
            "replica_costs": [r.best_cost for r in ok],
            "evaluations": [r.evaluations for r in ok],
            "seeds": {
                "global": self.config.seed,
                "replicas": [r.fingerprint for r in self.replicas],
            },
            "errors": self.errors,
            "details": self.details,
            "wall_time_s": self.wall_time_s,
            "trace_files": self.trace_files,
        }


def _write_traces(replicas, trace_dir):
    paths = []
    for replica in replicas:
        if replica.ok:
            path = Path(trace_dir) / f"replica_{replica.index:04d}.csv"
            paths.append(str(replica.trace.write_csv(path)))
    return paths


def run(config):
    """Run every replica and keep the best decoded result."""
    sequences = spawn_sequences(config.seed, config.replicas)
    jobs = min(config.workers, config.replicas)
    logger.info(
        "Running %s replicas of %s (n=%s, N=%s) on %s workers",
        config.replicas, config.cost.family, config.ansatz.n, config.ansatz.arity,
        jobs,
    )
    started = time.perf_counter()
    replicas = Parallel(n_jobs=jobs, backend="loky")(
        delayed(run_replica)(
            config.cost,
            config.ansatz,
            config.mode,
            config.policy,
            config.plan,
            config.group_cap,
            index,
            sequence,
        )
        for index, sequence in enumerate(sequences)
    )
    elapsed = time.perf_counter() - started
    replicas = sorted(replicas, key=lambda r: r.index)

    best = None
    for replica in replicas:
        if replica.ok and (best is None or replica.best_cost < best.best_cost):
            best = replica
    if best is None:
        raise RunError(
            f"All {config.replicas} replicas aborted; first error: "
            f"{replicas[0].error}",
            errors=[r.error for r in replicas],
        )

    trace_files = []
    if config.trace_dir:
        trace_files = _write_traces(replicas, config.trace_dir)
    cost = config.cost
    result = RunResult(
        config=config,
        replicas=replicas,
        best_assignment=best.best_assignment,
        best_cost=best.best_cost,
        found_value=cost.reported_value(best.best_cost, best.best_assignment),
        wall_time_s=elapsed,
        trace_files=trace_files,
        details=cost.describe(best.best_assignment),
    )
    logger.info(
        "Run finished in %.3fs: best %r (%s/%s replicas ok)",
        elapsed, result.best_cost, len(replicas) - len(result.errors), len(replicas),
    )
    return result
