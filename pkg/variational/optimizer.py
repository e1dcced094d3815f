"""
Gradient-free minimisation with a plateau stopping rule.

One iteration is one objective evaluation. Besides the method's own
convergence test, a run stops when the best value has changed by less than
``plateau_rel_change`` over the last ``plateau_window`` evaluations (counted
after the ``d + 1`` evaluations that build the initial simplex), or when
``max_iters`` evaluations have been spent.
"""
import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from scipy import optimize

from problems.rng import make_rng

from .constants import (
    DEFAULT_ABS_TOL,
    DEFAULT_MAX_ITERS,
    DEFAULT_PLATEAU_REL_CHANGE,
    DEFAULT_PLATEAU_WINDOW,
    INIT_RANGE,
    INITIAL_SIMPLEX_EDGE,
    RELATIVE_FLOOR,
    TRACE_HEADER,
)
from .enums import OptimizerMethod, StopReason
from .exceptions import ObjectiveError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StopPolicy:
    max_iters: int = DEFAULT_MAX_ITERS
    plateau_window: int = DEFAULT_PLATEAU_WINDOW
    plateau_rel_change: float = DEFAULT_PLATEAU_REL_CHANGE
    abs_tol: float = DEFAULT_ABS_TOL
    method: str = OptimizerMethod.NELDER_MEAD

    def __post_init__(self):
        errors = []
        if int(self.max_iters) < 1:
            errors.append("max_iters must be >= 1")
        if int(self.plateau_window) < 2:
            errors.append("plateau_window must be >= 2")
        if float(self.plateau_rel_change) < 0:
            errors.append("plateau_rel_change must be >= 0")
        if float(self.abs_tol) <= 0:
            errors.append("abs_tol must be > 0")
        if self.method not in OptimizerMethod.values:
            errors.append(f"unknown method {self.method!r}")
        if errors:
            raise ValidationError(
                [ValidationError(e, code="invalid_policy") for e in errors]
            )
        object.__setattr__(self, "method", OptimizerMethod(self.method))

    def to_dict(self):
        return {
            "max_iters": self.max_iters,
            "plateau_window": self.plateau_window,
            "plateau_rel_change": self.plateau_rel_change,
            "abs_tol": self.abs_tol,
            "method": str(self.method),
        }


def relative_change(prev_best, new_best):
    return abs(new_best - prev_best) / max(abs(prev_best), RELATIVE_FLOOR)


@dataclass
class TraceRecord:
    iteration: int
    cost: float
    best_cost: float
    decoded_cost: float = None

    def as_row(self):
        decoded = "" if self.decoded_cost is None else repr(self.decoded_cost)
        return [self.iteration, repr(self.cost), repr(self.best_cost), decoded]


@dataclass
class Trace:
    records: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def append(self, cost, decoded_cost=None):
        best = cost if not self.records else min(cost, self.records[-1].best_cost)
        record = TraceRecord(len(self.records) + 1, cost, best, decoded_cost)
        self.records.append(record)
        return record

    def extend(self, other):
        """Append ``other``'s records, continuing the count and the running bests."""
        floor = self.records[-1].decoded_cost if self.records else None
        for record in other.records:
            decoded = record.decoded_cost
            if floor is not None and decoded is not None:
                decoded = min(floor, decoded)
            floor = floor if decoded is None else decoded
            self.append(record.cost, decoded)
        return self

    @property
    def best_costs(self):
        return [r.best_cost for r in self.records]

    def write_csv(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(TRACE_HEADER)
            writer.writerows(r.as_row() for r in self.records)
        return path

    @classmethod
    def read_csv(cls, path):
        trace = cls()
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames != TRACE_HEADER:
                raise ValidationError(
                    "Trace %(path)s has header %(header)s.",
                    code="malformed_trace",
                    params={"path": path, "header": reader.fieldnames},
                )
            for row in reader:
                decoded = row["decoded_cost"]
                trace.records.append(
                    TraceRecord(
                        int(row["iter"]),
                        float(row["cost"]),
                        float(row["best_cost"]),
                        float(decoded) if decoded else None,
                    )
                )
        return trace


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    trace: Trace
    stop_reason: str
    evaluations: int
    best_evaluation: object = None

    @property
    def best_decoded(self):
        """``(exact value, assignment)`` of the best decode seen, if any."""
        if self.best_evaluation is None:
            return None
        return self.best_evaluation.best


class _Stop(Exception):
    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


class _Tracker:
    """Wraps the objective: records the trace and enforces the stop rules."""

    def __init__(self, objective, dimension, policy):
        self.objective = objective
        self.policy = policy
        self.warmup = dimension + 1
        self.trace = Trace()
        self.best_x = None
        self.best_evaluation = None

    def _decoded(self, result):
        best = getattr(result, "best", None)
        if best is None:
            return None
        current = self.best_evaluation
        if current is None or best[0] < current.best[0]:
            self.best_evaluation = result
        return self.best_evaluation.best[0]

    def __call__(self, x):
        if len(self.trace) >= self.policy.max_iters:
            raise _Stop(StopReason.MAX_ITERS)
        result = self.objective(x)
        value = float(getattr(result, "value", result))
        if not np.isfinite(value):
            raise ObjectiveError(
                f"Objective returned {value} at x={np.asarray(x).tolist()}",
                x=np.array(x, copy=True),
            )
        decoded = self._decoded(result)
        previous = self.trace.records[-1].best_cost if self.trace.records else None
        self.trace.append(value, decoded)
        if previous is None or value < previous:
            self.best_x = np.array(x, copy=True)

        count = len(self.trace)
        window = self.policy.plateau_window
        if count >= self.warmup + window:
            before = self.trace.records[count - window - 1].best_cost
            now = self.trace.records[-1].best_cost
            if relative_change(before, now) < self.policy.plateau_rel_change:
                raise _Stop(StopReason.PLATEAU)
        return value


def _run_method(tracker, x0, policy):
    budget = 10 * policy.max_iters + len(x0) + 1
    if policy.method == OptimizerMethod.COBYLA:
        optimize.minimize(
            tracker,
            x0,
            method="COBYLA",
            options={
                "rhobeg": INITIAL_SIMPLEX_EDGE,
                "tol": policy.abs_tol,
                "maxiter": budget,
            },
        )
        return
    simplex = np.vstack([x0, x0 + INITIAL_SIMPLEX_EDGE * np.eye(len(x0))])
    optimize.minimize(
        tracker,
        x0,
        method="Nelder-Mead",
        options={
            "adaptive": True,
            "initial_simplex": simplex,
            "xatol": policy.abs_tol,
            "fatol": policy.abs_tol,
            "maxfev": budget,
            "maxiter": budget,
        },
    )


def minimize(objective, x0, policy=None, seed=None):
    """
    Minimise ``objective`` from ``x0``.

    ``x0`` may be an integer dimension, in which case the start point is
    drawn uniformly from ``[-2 pi, 2 pi]`` using ``seed``. The objective may
    return a float or a cost evaluation carrying ``value`` and ``best``; in
    the latter case the best decode seen is tracked in the trace.
    """
    policy = policy or StopPolicy()
    if np.ndim(x0) == 0:
        low, high = INIT_RANGE
        x0 = make_rng(seed or 0, "start").uniform(low, high, size=int(x0))
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.size < 1:
        raise ValidationError("Parameter vector is empty.", code="empty_parameters")

    tracker = _Tracker(objective, x0.size, policy)
    try:
        _run_method(tracker, x0, policy)
        reason = StopReason.CONVERGED
    except _Stop as stop:
        reason = stop.reason

    logger.debug(
        "minimize stopped (%s) after %s evaluations, best %r",
        reason, len(tracker.trace), tracker.trace.records[-1].best_cost,
    )
    return MinimizeResult(
        x=tracker.best_x,
        fun=tracker.trace.records[-1].best_cost,
        trace=tracker.trace,
        stop_reason=reason,
        evaluations=len(tracker.trace),
        best_evaluation=tracker.best_evaluation,
    )
