"""
Entanglement-free ansatz.

Each qubit carries its own chain of single-qubit rotations, ``m`` layers
repeated ``t`` times with the same angles, so the circuit output is a
product state and every qubit can be computed analytically from its own
angles. States are handled as ``(n, 2)`` complex arrays of amplitudes;
:class:`QubitState` is the single-qubit view of one row.

N-ary variables are read from the Bloch sphere: label ``j`` is the real
state at half-angle ``pi * j / N`` and a qubit decodes to the label of
highest fidelity.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from django.core.exceptions import ValidationError

from problems.enums import ProblemFamily

from .constants import (
    FIDELITY_FLOOR,
    INIT_RANGE,
    LARGE_ARITY,
    LARGE_HYPERPARAMETERS,
    LARGE_TSP_CITIES,
    NORM_TOLERANCE,
    SMALL_HYPERPARAMETERS,
    SMALL_PROBLEM_LIMIT,
)
from .enums import GateSet
from .exceptions import DvqoaError


@dataclass(frozen=True)
class AnsatzConfig:
    n: int
    m: int = SMALL_HYPERPARAMETERS
    t: int = SMALL_HYPERPARAMETERS
    gate_set: str = GateSet.RY
    arity: int = 2

    def __post_init__(self):
        for name in ("n", "m", "t"):
            if int(getattr(self, name)) < 1:
                raise ValidationError(
                    "Ansatz %(name)s must be >= 1 (got %(value)s).",
                    code="invalid_ansatz",
                    params={"name": name, "value": getattr(self, name)},
                )
        if int(self.arity) < 2:
            raise ValidationError(
                "Ansatz arity must be >= 2 (got %(value)s).",
                code="invalid_ansatz",
                params={"value": self.arity},
            )
        if self.gate_set not in GateSet.values:
            raise ValidationError(
                "Unknown gate set %(value)s.",
                code="invalid_gate_set",
                params={"value": self.gate_set},
            )
        object.__setattr__(self, "gate_set", GateSet(self.gate_set))

    @property
    def gates_per_layer(self):
        return 2 if self.gate_set == GateSet.RXRY else 1

    @property
    def dimension(self):
        """Trainable angle count ``d``."""
        return self.n * self.m * self.gates_per_layer

    @property
    def shape(self):
        if self.gate_set == GateSet.RXRY:
            return (self.n, self.m, 2)
        return (self.n, self.m)

    def check_parameters(self, theta):
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if theta.size != self.dimension:
            raise ValidationError(
                "Parameter vector has %(got)s angles, ansatz needs %(d)s.",
                code="dimension_mismatch",
                params={"got": theta.size, "d": self.dimension},
            )
        return theta

    def random_parameters(self, rng):
        """Initial angles drawn uniformly from ``[-2 pi, 2 pi]``."""
        low, high = INIT_RANGE
        return rng.uniform(low, high, size=self.dimension)

    def to_dict(self):
        return {
            "n": self.n,
            "m": self.m,
            "t": self.t,
            "gate_set": str(self.gate_set),
            "N": self.arity,
        }


@dataclass(frozen=True)
class QubitState:
    amp0: complex
    amp1: complex

    @classmethod
    def from_vector(cls, vector):
        return cls(complex(vector[0]), complex(vector[1]))

    @property
    def vector(self):
        return np.array([self.amp0, self.amp1], dtype=complex)

    @property
    def norm(self):
        return float(np.sqrt(abs(self.amp0) ** 2 + abs(self.amp1) ** 2))


def _as_amplitudes(states):
    if isinstance(states, QubitState):
        return states.vector
    if isinstance(states, (list, tuple)) and states and isinstance(
        states[0], QubitState
    ):
        return np.array([s.vector for s in states])
    return np.asarray(states, dtype=complex)


def _rx(angles):
    c = np.cos(angles / 2)
    s = np.sin(angles / 2)
    out = np.empty(angles.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = -1j * s
    out[..., 1, 0] = -1j * s
    out[..., 1, 1] = c
    return out


def _ry(angles):
    c = np.cos(angles / 2)
    s = np.sin(angles / 2)
    out = np.empty(angles.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def qubit_states(config, theta):
    """All ``n`` qubit states as an ``(n, 2)`` complex array."""
    theta = config.check_parameters(theta).reshape(config.shape)
    if config.gate_set == GateSet.RXRY:
        layers = _rx(theta[..., 0]) @ _ry(theta[..., 1])
        unitary = np.broadcast_to(np.eye(2, dtype=complex), (config.n, 2, 2))
        for layer in range(config.m):
            unitary = layers[:, layer] @ unitary
        unitary = np.linalg.matrix_power(unitary, config.t)
        return np.ascontiguousarray(unitary[:, :, 0])

    half = config.t * theta.sum(axis=1) / 2
    states = np.empty((config.n, 2), dtype=complex)
    states[:, 0] = np.cos(half)
    if config.gate_set == GateSet.RX:
        states[:, 1] = -1j * np.sin(half)
    else:
        states[:, 1] = np.sin(half)
    return states


def qubit_state(config, theta, i):
    if not 0 <= int(i) < config.n:
        raise ValidationError(
            "Qubit index %(i)s outside 0..%(last)s.",
            code="index_out_of_range",
            params={"i": i, "last": config.n - 1},
        )
    return QubitState.from_vector(qubit_states(config, theta)[int(i)])


def probability_one(states):
    """``|amp1|**2`` of one state or of each row of an ``(n, 2)`` array."""
    amps = _as_amplitudes(states)
    p = np.abs(amps[..., 1]) ** 2
    return float(p) if np.ndim(p) == 0 else p


def decode_binary(p):
    """1 if ``p > 0.5``; the tie at exactly 0.5 reads as 0."""
    bits = (np.asarray(p) > 0.5).astype(np.int64)
    return int(bits) if bits.ndim == 0 else bits


@dataclass(frozen=True)
class LabelSet:
    arity: int

    def __post_init__(self):
        if int(self.arity) < 2:
            raise ValidationError(
                "A label set needs N >= 2 (got %(value)s).",
                code="invalid_arity",
                params={"value": self.arity},
            )

    @cached_property
    def half_angles(self):
        return np.pi * np.arange(self.arity) / self.arity

    @cached_property
    def labels(self):
        """``(N, 2)`` real label vectors ``(cos b_j, sin b_j)``."""
        return np.column_stack([np.cos(self.half_angles), np.sin(self.half_angles)])


def fidelities(states, labels):
    """``|<label_j|state>|**2`` for every state (rows) and label (columns)."""
    amps = _as_amplitudes(states)
    return np.abs(amps @ labels.labels.T) ** 2


def _argmax_lowest(values):
    top = values.max(axis=-1, keepdims=True)
    return np.argmax(values >= top - NORM_TOLERANCE, axis=-1)


def decode_nary(states, labels):
    """Label of highest fidelity; ties go to the lowest index."""
    choice = _argmax_lowest(fidelities(states, labels))
    return int(choice) if choice.ndim == 0 else choice.astype(np.int64)


def label_probabilities(states, labels):
    f = fidelities(states, labels)
    total = f.sum(axis=-1, keepdims=True)
    if np.any(total < FIDELITY_FLOOR):
        raise DvqoaError(
            f"Label fidelities sum below {FIDELITY_FLOOR}; state is not normalised."
        )
    return f / total


def decode_states(states, arity):
    """Deterministic assignment of an ``(n, 2)`` state array."""
    if arity == 2:
        return decode_binary(probability_one(states))
    return decode_nary(states, LabelSet(arity))


def marginals(states, arity):
    """``(n, N)`` per-variable label distributions used for sampling."""
    if arity == 2:
        p = probability_one(states)
        return np.column_stack([1.0 - p, p])
    return label_probabilities(states, LabelSet(arity))


def default_hyperparameters(n, arity=2, family=None, cities=None):
    """``(m, t)`` defaults by problem size and arity."""
    if family == ProblemFamily.TSP and cities is not None:
        value = LARGE_HYPERPARAMETERS if cities >= LARGE_TSP_CITIES else (
            SMALL_HYPERPARAMETERS
        )
        return value, value
    if n > SMALL_PROBLEM_LIMIT or arity >= LARGE_ARITY:
        return LARGE_HYPERPARAMETERS, LARGE_HYPERPARAMETERS
    return SMALL_HYPERPARAMETERS, SMALL_HYPERPARAMETERS
