"""
Scaling benchmarks.

Each suite returns :class:`BenchRow` objects; seconds are wall-clock time
around the measured loop only (instance generation is excluded).
"""
import csv
import logging
import math
import time
from dataclasses import asdict, dataclass

import numpy as np
from django.core.exceptions import ValidationError
from scipy import stats

from problems.generators import gen_qubo
from problems.oracle import brute_force_poly
from problems.rng import make_rng

from .ansatz import (
    AnsatzConfig,
    decode_states,
    default_hyperparameters,
    qubit_states,
)
from .constants import DEFAULT_GROUP_CAP
from .enums import GateSet
from .evaluator import PartitionPlan, PolynomialCost, variable_means
from .optimizer import StopPolicy
from .runner import RunConfig, approximation_ratio, run

logger = logging.getLogger(__name__)

BENCH_HEADER = [
    "suite",
    "size",
    "mode",
    "partitions",
    "workers",
    "m",
    "t",
    "gate_set",
    "seconds",
    "approx_ratio",
]

# Fixed instance size of the suites that vary something other than n.
_FIXED_N = 12


@dataclass
class BenchRow:
    suite: str
    size: int
    mode: str
    partitions: int = 1
    workers: int = 1
    m: int = None
    t: int = None
    gate_set: str = GateSet.RY
    seconds: float = 0.0
    approx_ratio: float = None

    def as_row(self):
        data = asdict(self)
        return ["" if data[key] is None else str(data[key]) for key in BENCH_HEADER]


@dataclass(frozen=True)
class Fit:
    label: str
    slope: float
    intercept: float
    r_squared: float

    def __str__(self):
        return (
            f"{self.label}: slope={self.slope:.6g} intercept={self.intercept:.6g} "
            f"R^2={self.r_squared:.4f}"
        )


def _timed(fn, repeats):
    started = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - started) / repeats


def _theta(config, seed):
    return config.random_parameters(make_rng(seed, "bench"))


def eval_scaling(sizes, repeats=3, seed=0, **_):
    """Per-qubit state build and decode; no cost terms are summed."""
    rows = []
    for n in sizes:
        config = AnsatzConfig(n)
        theta = _theta(config, seed)
        seconds = _timed(lambda: decode_states(qubit_states(config, theta), 2), repeats)
        rows.append(
            BenchRow(
                "eval_scaling",
                n,
                "per_qubit",
                partitions=n,
                m=config.m,
                t=config.t,
                seconds=seconds,
            )
        )
    return rows


def partition_scaling(sizes, repeats=3, seed=0, group_cap=DEFAULT_GROUP_CAP, **_):
    """One group of ``g`` qubits per size: the dense ``2**g`` vector dominates."""
    rows = []
    for g in sizes:
        config = AnsatzConfig(g)
        states = qubit_states(config, _theta(config, seed))
        plan = PartitionPlan.single(g)
        seconds = _timed(lambda: variable_means(states, 2, plan, group_cap), repeats)
        rows.append(
            BenchRow(
                "partition_scaling",
                g,
                "grouped",
                m=config.m,
                t=config.t,
                seconds=seconds,
            )
        )
    return rows


def _solve(poly, config, seed, workers, replicas, policy, mode=None):
    run_config = RunConfig(
        cost=PolynomialCost(poly),
        ansatz=config,
        mode=mode,
        policy=policy or StopPolicy(),
        replicas=replicas,
        workers=workers,
        seed=seed,
    )
    return run(run_config)


def _dvqoa_row(suite, poly, config, optimum, seed, workers, replicas, policy):
    result = _solve(poly, config, seed, workers, replicas, policy)
    ratio = approximation_ratio(result.found_value, optimum, result.config.cost.family)
    return BenchRow(
        suite,
        config.n,
        "dvqoa",
        workers=workers,
        m=config.m,
        t=config.t,
        gate_set=config.gate_set,
        seconds=result.wall_time_s,
        approx_ratio=ratio.ratio,
    )


def worker_scaling(sizes, seed=0, replicas=8, policy=None, **_):
    poly = gen_qubo(_FIXED_N, seed)
    optimum = brute_force_poly(poly).optimum
    config = AnsatzConfig(_FIXED_N)
    return [
        _dvqoa_row(
            "worker_scaling", poly, config, optimum, seed, workers, replicas, policy
        )
        for workers in sizes
    ]


def brute_vs_dvqoa(sizes, seed=0, workers=1, replicas=4, policy=None, **_):
    rows = []
    for n in sizes:
        poly = gen_qubo(n, seed)
        oracle = brute_force_poly(poly, workers=workers)
        rows.append(
            BenchRow(
                "brute_vs_dvqoa",
                n,
                "brute",
                workers=workers,
                gate_set="",
                seconds=oracle.wall_time_s,
                approx_ratio=1.0,
            )
        )
        config = AnsatzConfig(n, *default_hyperparameters(n))
        rows.append(
            _dvqoa_row(
                "brute_vs_dvqoa", poly, config, oracle.optimum, seed, workers,
                replicas, policy,
            )
        )
    return rows


def hyperparameter(sizes, seed=0, workers=1, replicas=4, policy=None, **_):
    """Grid over ``(m, t)`` pairs drawn from ``sizes`` on a fixed QUBO."""
    poly = gen_qubo(_FIXED_N, seed)
    optimum = brute_force_poly(poly).optimum
    return [
        _dvqoa_row(
            "hyperparameter", poly, AnsatzConfig(_FIXED_N, m, t), optimum, seed,
            workers, replicas, policy,
        )
        for m in sizes
        for t in sizes
    ]


def gate_set(sizes, seed=0, workers=1, replicas=4, policy=None, **_):
    rows = []
    for n in sizes:
        poly = gen_qubo(n, seed)
        optimum = brute_force_poly(poly, workers=workers).optimum
        for gates in GateSet.values:
            config = AnsatzConfig(n, gate_set=gates)
            rows.append(
                _dvqoa_row(
                    "gate_set", poly, config, optimum, seed, workers, replicas, policy
                )
            )
    return rows


SUITES = {
    "eval_scaling": eval_scaling,
    "partition_scaling": partition_scaling,
    "worker_scaling": worker_scaling,
    "brute_vs_dvqoa": brute_vs_dvqoa,
    "hyperparameter": hyperparameter,
    "gate_set": gate_set,
}


def bench(suite, sizes, repeats=3, **options):
    if suite not in SUITES:
        raise ValidationError(
            "Unknown bench suite %(suite)s.",
            code="unknown_suite",
            params={"suite": suite},
        )
    logger.info("Bench %s over sizes %s", suite, list(sizes))
    return SUITES[suite](list(sizes), repeats=repeats, **options)


def parse_sizes(text):
    """``"8,16,32"`` or an inclusive range ``"8..16"``."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = (int(v) for v in text.split("..", 1))
            sizes = list(range(lo, hi + 1))
        else:
            sizes = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        sizes = []
    if not sizes or any(s < 1 for s in sizes):
        raise ValidationError(
            "Cannot parse sizes %(text)r.", code="invalid_sizes", params={"text": text}
        )
    return sizes


def _linear_fit(label, x, y):
    if len(x) < 2 or len(set(x)) < 2:
        return None
    result = stats.linregress(x, y)
    return Fit(label, result.slope, result.intercept, result.rvalue**2)


def fit_rows(rows):
    """Linear or log-linear fits of seconds against size for the scaling suites."""
    fits = []
    for suite, mode, log in (
        ("eval_scaling", None, False),
        ("partition_scaling", None, True),
        ("brute_vs_dvqoa", "brute", True),
        ("brute_vs_dvqoa", "dvqoa", False),
    ):
        chosen = [
            r for r in rows
            if r.suite == suite and (mode is None or r.mode == mode) and r.seconds > 0
        ]
        x = [r.size for r in chosen]
        y = [math.log2(r.seconds) if log else r.seconds for r in chosen]
        name = suite if mode is None else f"{suite}[{mode}]"
        target = "log2(seconds)" if log else "seconds"
        fit = _linear_fit(f"{name} {target} ~ size", x, y)
        if fit is not None:
            fits.append(fit)
    return fits


def doubling_ratio(rows, mode="brute"):
    """Mean time ratio between consecutive sizes of brute_vs_dvqoa rows."""
    chosen = sorted(
        (r for r in rows if r.suite == "brute_vs_dvqoa" and r.mode == mode),
        key=lambda r: r.size,
    )
    ratios = [
        b.seconds / a.seconds
        for a, b in zip(chosen, chosen[1:])
        if a.seconds > 0 and b.size == a.size + 1
    ]
    return float(np.mean(ratios)) if ratios else None


def write_rows(rows, handle):
    writer = csv.writer(handle)
    writer.writerow(BENCH_HEADER)
    writer.writerows(r.as_row() for r in rows)
