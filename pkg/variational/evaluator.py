"""
Cost evaluation of ansatz parameters.

Three modes are supported: the analytic expectation over the product
distribution, the exact cost of the deterministic decode, and the mean over
sampled assignments. Every evaluation also carries the deterministic decode
and its exact value, which the optimizer uses for best-found tracking.

Cost objects (:class:`PolynomialCost`, :class:`TspCost`, :class:`PauliCost`,
:class:`BlackBoxCost`) bundle a problem with its default mode and are
picklable so replicas can run in worker processes.
"""
import logging
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from django.core.exceptions import ValidationError

from problems.enums import ProblemFamily
from problems.tsp import decode_tsp, is_one_hot, route_length

from .ansatz import decode_states, marginals, qubit_states
from .constants import DEFAULT_GROUP_CAP
from .enums import EvalKind
from .exceptions import BlackBoxError, DvqoaError, MemoryGuardError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalMode:
    kind: str = EvalKind.EXPECTATION
    shots: int = None

    def __post_init__(self):
        if self.kind not in EvalKind.values:
            raise ValidationError(
                "Unknown evaluation mode %(kind)s.",
                code="invalid_mode",
                params={"kind": self.kind},
            )
        object.__setattr__(self, "kind", EvalKind(self.kind))
        if self.kind == EvalKind.SHOTS:
            if self.shots is None or int(self.shots) < 1:
                raise ValidationError(
                    "Shot mode needs shots >= 1 (got %(shots)s).",
                    code="invalid_shots",
                    params={"shots": self.shots},
                )
            object.__setattr__(self, "shots", int(self.shots))
        else:
            object.__setattr__(self, "shots", None)

    @classmethod
    def expectation(cls):
        return cls(EvalKind.EXPECTATION)

    @classmethod
    def decode(cls):
        return cls(EvalKind.DECODE)

    @classmethod
    def sampled(cls, shots):
        return cls(EvalKind.SHOTS, shots)

    def __str__(self):
        if self.kind == EvalKind.SHOTS:
            return f"shots({self.shots})"
        return str(self.kind)


@dataclass(frozen=True)
class PartitionPlan:
    sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValidationError(
                "Partition sizes must be positive integers (got %(sizes)s).",
                code="invalid_partition",
                params={"sizes": list(self.sizes)},
            )
        object.__setattr__(self, "sizes", sizes)

    @property
    def n(self):
        return sum(self.sizes)

    @property
    def is_trivial(self):
        return all(s == 1 for s in self.sizes)

    @property
    def spans(self):
        edges = np.cumsum((0,) + self.sizes)
        return [(int(a), int(b)) for a, b in zip(edges, edges[1:])]

    def check(self, n):
        if self.n != n:
            raise ValidationError(
                "Partition sizes sum to %(total)s, expected n=%(n)s.",
                code="invalid_partition",
                params={"total": self.n, "n": n},
            )
        return self

    @classmethod
    def single(cls, n):
        return cls((n,))

    @classmethod
    def per_qubit(cls, n):
        return cls((1,) * n)

    @classmethod
    def even(cls, n, parts):
        """``parts`` contiguous groups whose sizes differ by at most one."""
        if not 1 <= int(parts) <= int(n):
            raise ValidationError(
                "Cannot split %(n)s qubits into %(parts)s groups.",
                code="invalid_partition",
                params={"n": n, "parts": parts},
            )
        base, extra = divmod(int(n), int(parts))
        return cls(tuple(base + 1 if i < extra else base for i in range(parts)))

    @classmethod
    def capped(cls, n, width):
        """Fewest near-equal groups of at most ``width`` qubits."""
        if int(width) < 1:
            raise ValidationError(
                "Group width must be >= 1 (got %(width)s).",
                code="invalid_partition",
                params={"width": width},
            )
        return cls.even(n, math.ceil(int(n) / int(width)))

    @classmethod
    def parse(cls, text, n):
        """A group count (``"3"``) or explicit sizes (``"4,4,4"``)."""
        text = str(text).strip()
        try:
            values = [int(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise ValidationError(
                "Cannot parse partitions %(text)r.",
                code="invalid_partition",
                params={"text": text},
            ) from None
        if len(values) == 1 and "," not in text:
            return cls.even(n, values[0])
        return cls(tuple(values)).check(n)

    def __str__(self):
        return ",".join(str(s) for s in self.sizes)


@dataclass
class CostEvaluation:
    """
    ``value`` is the objective seen by the optimizer; ``assignment`` and
    ``exact_value`` are the deterministic decode and its exact cost. Shot
    evaluations also report their best sample.
    """

    value: float
    assignment: tuple
    exact_value: float
    sample: tuple = None
    sample_value: float = None

    def __post_init__(self):
        self.assignment = tuple(int(v) for v in self.assignment)
        if self.sample is not None:
            self.sample = tuple(int(v) for v in self.sample)

    @property
    def best(self):
        """``(exact value, assignment)`` of the better of decode and sample."""
        if self.sample is not None and self.sample_value < self.exact_value:
            return self.sample_value, self.sample
        return self.exact_value, self.assignment


def _check_group_cap(size, cap):
    if size > cap:
        logger.warning("Refusing grouped simulation of %s qubits (cap %s)", size, cap)
        raise MemoryGuardError(
            f"Group of {size} qubits exceeds the grouped-simulation cap of {cap} "
            f"(a {2**size}-amplitude vector)."
        )


def grouped_state(states, plan, cap=DEFAULT_GROUP_CAP):
    """
    Dense vector of every group, the Kronecker product of its members with
    the first qubit as the most significant factor.
    """
    states = np.asarray(states, dtype=complex)
    plan.check(states.shape[0])
    for size in plan.sizes:
        _check_group_cap(size, cap)
    return [reduce(np.kron, states[lo:hi]) for lo, hi in plan.spans]


def joint_probabilities(states, plan, cap=DEFAULT_GROUP_CAP):
    """Outcome distribution over all ``2**n`` bitstrings built from the groups."""
    groups = grouped_state(states, plan, cap)
    return reduce(np.kron, [np.abs(v) ** 2 for v in groups])


def _group_means(vector, size):
    probs = (np.abs(vector) ** 2).reshape((2,) * size)
    return np.array(
        [np.moveaxis(probs, q, 0).reshape(2, -1).sum(axis=1)[1] for q in range(size)]
    )


def _sample_group(vector, size, shots, rng):
    probs = np.abs(vector) ** 2
    index = rng.choice(probs.size, size=shots, p=probs / probs.sum())
    return (index[:, np.newaxis] >> np.arange(size - 1, -1, -1)) & 1


def variable_means(states, arity, plan=None, cap=DEFAULT_GROUP_CAP):
    """Mean label of every variable under the product distribution."""
    if arity == 2 and plan is not None and not plan.is_trivial:
        groups = grouped_state(states, plan, cap)
        return np.concatenate(
            [_group_means(v, size) for v, size in zip(groups, plan.sizes)]
        )
    return marginals(states, arity) @ np.arange(arity)


def sample_assignments(states, arity, shots, rng, plan=None, cap=DEFAULT_GROUP_CAP):
    """``(shots, n)`` independent draws from the product distribution."""
    if arity == 2 and plan is not None and not plan.is_trivial:
        groups = grouped_state(states, plan, cap)
        return np.hstack(
            [
                _sample_group(v, size, shots, rng)
                for v, size in zip(groups, plan.sizes)
            ]
        ).astype(np.int64)
    cdf = np.cumsum(marginals(states, arity), axis=1)[:, :-1]
    draws = rng.random((shots, cdf.shape[0]))
    return (draws[:, :, np.newaxis] >= cdf[np.newaxis, :, :]).sum(axis=2)


def _check_compatible(n, arity, config):
    if n != config.n or arity != config.arity:
        raise ValidationError(
            "Cost over n=%(n)s, N=%(arity)s does not match the ansatz "
            "(n=%(cn)s, N=%(carity)s).",
            code="dimension_mismatch",
            params={"n": n, "arity": arity, "cn": config.n, "carity": config.arity},
        )


def poly_cost(
    poly, config, theta, mode=None, rng=None, plan=None, group_cap=DEFAULT_GROUP_CAP
):
    """Evaluate a polynomial cost; returns a :class:`CostEvaluation`."""
    mode = mode or EvalMode.expectation()
    _check_compatible(poly.n, poly.arity, config)
    states = qubit_states(config, theta)
    assignment = decode_states(states, config.arity)
    exact = poly.evaluate(assignment)

    if mode.kind == EvalKind.DECODE:
        return CostEvaluation(exact, assignment, exact)
    if mode.kind == EvalKind.EXPECTATION:
        means = variable_means(states, config.arity, plan, group_cap)
        return CostEvaluation(poly.expectation(means), assignment, exact)

    if rng is None:
        raise ValidationError("Shot mode needs a random generator.", code="no_rng")
    samples = sample_assignments(
        states, config.arity, mode.shots, rng, plan, group_cap
    )
    values = poly.evaluate_many(samples)
    best = int(np.argmin(values))
    return CostEvaluation(
        float(values.mean()),
        assignment,
        exact,
        sample=samples[best],
        sample_value=float(values[best]),
    )


def pauli_expectation(hamiltonian, states):
    """Factorised ``<psi|H|psi>`` for a product state (one row per qubit)."""
    amps = np.asarray(states, dtype=complex)
    if amps.shape[0] != hamiltonian.n:
        raise ValidationError(
            "Hamiltonian over %(n)s qubits given %(got)s states.",
            code="dimension_mismatch",
            params={"n": hamiltonian.n, "got": amps.shape[0]},
        )
    cross = np.conj(amps[:, 0]) * amps[:, 1]
    table = np.column_stack(
        [
            np.ones(hamiltonian.n),
            2.0 * cross.real,
            2.0 * cross.imag,
            np.abs(amps[:, 0]) ** 2 - np.abs(amps[:, 1]) ** 2,
        ]
    )
    factors = table[np.arange(hamiltonian.n), hamiltonian.codes]
    return float(hamiltonian.coefficients @ factors.prod(axis=1))


def basis_states(assignment):
    """Computational basis product state for a bitstring."""
    bits = np.asarray(assignment, dtype=np.int64)
    states = np.zeros((bits.size, 2), dtype=complex)
    states[np.arange(bits.size), bits] = 1.0
    return states


def blackbox_cost(fn, config, theta):
    """Decode deterministically and evaluate ``fn`` once on the assignment."""
    assignment = decode_states(qubit_states(config, theta), config.arity)
    try:
        value = float(fn(np.asarray(assignment, dtype=np.int64)))
    except DvqoaError:
        raise
    except Exception as exc:
        raise BlackBoxError(
            f"Black-box cost failed on assignment {assignment.tolist()}: {exc}",
            assignment=tuple(int(v) for v in assignment),
        ) from exc
    return CostEvaluation(value, assignment, value)


def _require_mode(mode, allowed, what):
    if mode.kind not in allowed:
        raise ValidationError(
            "%(what)s costs do not support %(mode)s mode.",
            code="unsupported_mode",
            params={"what": what, "mode": str(mode)},
        )


class PolynomialCost:
    default_mode = EvalMode(EvalKind.EXPECTATION)

    def __init__(self, polynomial, family=ProblemFamily.QUBO, graph=None):
        self.polynomial = polynomial
        self.family = ProblemFamily(family)
        self.graph = graph

    @property
    def n(self):
        return self.polynomial.n

    @property
    def arity(self):
        return self.polynomial.arity

    @property
    def max_order(self):
        return self.polynomial.max_order

    @property
    def refine_mode(self):
        """
        Mode of the follow-up pass after an expectation run. N-ary label means
        cannot reach the end labels, so those runs finish on their decodes.
        """
        return EvalMode.decode() if self.arity > 2 else None

    def evaluate(
        self, config, theta, mode, rng=None, plan=None, group_cap=DEFAULT_GROUP_CAP
    ):
        return poly_cost(self.polynomial, config, theta, mode, rng, plan, group_cap)

    def reported_value(self, value, assignment):
        return value

    def describe(self, assignment):
        if self.graph is None:
            return {}
        return {"cut_size": self.graph.cut_size(assignment)}


class TspCost(PolynomialCost):
    """One-hot TSP QUBO; found values are decoded tour lengths."""

    def __init__(self, instance, polynomial):
        super().__init__(polynomial, family=ProblemFamily.TSP)
        self.instance = instance

    def route(self, assignment):
        return decode_tsp(assignment, self.instance.size)

    def reported_value(self, value, assignment):
        return route_length(self.route(assignment), self.instance.cities)

    def describe(self, assignment):
        route = self.route(assignment)
        return {
            "route": list(route),
            "route_length": route_length(route, self.instance.cities),
            "feasible": is_one_hot(assignment, self.instance.size),
        }


class PauliCost:
    """
    Energy of the product state. The best slot keeps the lower of that energy
    and the exact energy of the decoded basis state.
    """

    default_mode = EvalMode(EvalKind.EXPECTATION)
    family = ProblemFamily.CHEMISTRY
    arity = 2
    max_order = None

    def __init__(self, hamiltonian):
        self.hamiltonian = hamiltonian

    @property
    def n(self):
        return self.hamiltonian.n

    def evaluate(
        self, config, theta, mode, rng=None, plan=None, group_cap=DEFAULT_GROUP_CAP
    ):
        _require_mode(mode, (EvalKind.EXPECTATION, EvalKind.DECODE), "Pauli-sum")
        _check_compatible(self.n, 2, config)
        states = qubit_states(config, theta)
        assignment = decode_states(states, 2)
        exact = pauli_expectation(self.hamiltonian, basis_states(assignment))
        if mode.kind == EvalKind.DECODE:
            return CostEvaluation(exact, assignment, exact)
        energy = pauli_expectation(self.hamiltonian, states)
        return CostEvaluation(
            energy, assignment, exact, sample=assignment, sample_value=energy
        )

    def reported_value(self, value, assignment):
        return value

    def describe(self, assignment):
        return {}


class BlackBoxCost:
    """Any callable over integer assignments, evaluated on the decode."""

    default_mode = EvalMode(EvalKind.DECODE)
    max_order = None

    def __init__(self, fn, n, arity=2, family=ProblemFamily.BLACKBOX):
        self.fn = fn
        self._n = int(n)
        self.arity = int(arity)
        self.family = ProblemFamily(family)

    @property
    def n(self):
        return self._n

    def evaluate(
        self, config, theta, mode, rng=None, plan=None, group_cap=DEFAULT_GROUP_CAP
    ):
        _require_mode(mode, (EvalKind.DECODE,), "Black-box")
        _check_compatible(self.n, self.arity, config)
        return blackbox_cost(self.fn, config, theta)

    def reported_value(self, value, assignment):
        return value

    def describe(self, assignment):
        describe = getattr(self.fn, "describe", None)
        return describe(assignment) if describe else {}
