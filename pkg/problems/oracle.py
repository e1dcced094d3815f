"""
Exact references.

``brute_force_poly`` enumerates all ``N**n`` assignments split into
contiguous index ranges, one per worker. Binary problems are walked in
Gray-code order, flipping one bit per step and updating the value by the
delta of the terms that contain it; every block of ``2**GRAY_BLOCK_BITS``
steps starts from a direct evaluation, so results do not depend on how
blocks are distributed. ``brute_force_tsp`` enumerates tours and
``dense_min_eigenvalue`` diagonalises a Pauli sum.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from functools import reduce
from itertools import permutations

import numpy as np
import scipy.sparse as sp
from joblib import Parallel, delayed
from scipy.linalg import eigh
from scipy.sparse.linalg import eigsh

from variational.exceptions import OracleCapError

from .constants import (
    DEFAULT_BRUTE_FORCE_CAP,
    DEFAULT_EIGEN_QUBIT_CAP,
    DEFAULT_TSP_CITY_CAP,
    GRAY_BLOCK_BITS,
    NARY_CHUNK,
    TIE_TOLERANCE,
)
from .rng import make_rng

logger = logging.getLogger(__name__)

# Largest qubit count diagonalised densely; above it Lanczos is used.
_DENSE_EIGEN_QUBITS = 10


@dataclass
class OracleResult:
    optimum: float
    optimizer: tuple
    enumerated: int
    wall_time_s: float = 0.0
    workers: int = 1
    extra: dict = field(default_factory=dict)

    @property
    def total_core_time_s(self):
        return self.wall_time_s * self.workers

    def to_dict(self):
        data = {
            "optimum": self.optimum,
            "optimizer": [int(v) for v in self.optimizer],
            "enumerated": self.enumerated,
            "wall_time_s": self.wall_time_s,
            "workers": self.workers,
            "total_core_time_s": self.total_core_time_s,
        }
        data.update(self.extra)
        return data


def _better(a, b):
    """Lower value wins; near-ties go to the lexicographically smaller assignment."""
    if a is None:
        return b
    if b is None:
        return a
    tol = TIE_TOLERANCE * max(1.0, abs(a[0]))
    if b[0] < a[0] - tol:
        return b
    if abs(b[0] - a[0]) <= tol and b[1] < a[1]:
        return b
    return a


def _spans(count, workers):
    edges = np.linspace(0, count, min(workers, count) + 1).round().astype(int)
    return [(int(lo), int(hi)) for lo, hi in zip(edges, edges[1:]) if hi > lo]


def _gray_bits(code, n):
    return np.array([(code >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.int64)


def _scan_gray(poly, block_lo, block_hi, bits):
    n = poly.n
    quadratic = all(len(key) <= 2 for key in poly.terms)
    if quadratic:
        linear, coupling = poly.quadratic_form()
    else:
        incidence = poly.incidence()
    best = None
    best_value = math.inf
    steps = 1 << bits

    for block in range(block_lo, block_hi):
        base = block << bits
        xe = np.ones(n + 1)
        xe[:n] = _gray_bits(base ^ (base >> 1), n)
        value = poly.evaluate(xe[:n])
        if quadratic:
            local = linear + coupling @ xe[:n]

        for step in range(steps):
            if step:
                j = n - (step & -step).bit_length()
                sign = 1.0 - 2.0 * xe[j]
                if quadratic:
                    value += sign * local[j]
                    local += sign * coupling[j]
                else:
                    coeffs, others = incidence[j]
                    value += sign * float(coeffs @ xe[others].prod(axis=1))
                xe[j] = 1.0 - xe[j]
            tol = TIE_TOLERANCE * max(1.0, abs(best_value))
            if value < best_value + tol:
                candidate = (value, tuple(int(v) for v in xe[:n]))
                best = _better(best, candidate)
                best_value = best[0]
    return best


def _scan_mixed_radix(poly, chunk_lo, chunk_hi, total):
    n, arity = poly.n, poly.arity
    powers = arity ** np.arange(n - 1, -1, -1, dtype=np.int64)
    best = None
    for chunk in range(chunk_lo, chunk_hi):
        index = np.arange(chunk * NARY_CHUNK, min((chunk + 1) * NARY_CHUNK, total))
        labels = (index[:, np.newaxis] // powers) % arity
        values = poly.evaluate_many(labels)
        low = values.min()
        tol = TIE_TOLERANCE * max(1.0, abs(low))
        first = int(np.flatnonzero(values <= low + tol)[0])
        candidate = (float(values[first]), tuple(int(v) for v in labels[first]))
        best = _better(best, candidate)
    return best


def brute_force_poly(poly, workers=1, cap=DEFAULT_BRUTE_FORCE_CAP):
    """Exact minimum of ``poly`` over ``{0..N-1}^n``; ties go to the smallest."""
    total = poly.arity ** poly.n
    if total > cap:
        raise OracleCapError(
            f"Brute force over {total} assignments exceeds the cap of {cap} work "
            f"units (N={poly.arity}, n={poly.n}).",
            work=total,
        )
    workers = max(1, int(workers))
    logger.info(
        "Brute force over %s assignments (n=%s, N=%s) with %s workers",
        total, poly.n, poly.arity, workers,
    )
    started = time.perf_counter()

    if poly.arity == 2:
        bits = min(poly.n, GRAY_BLOCK_BITS)
        spans = _spans(1 << (poly.n - bits), workers)
        tasks = (delayed(_scan_gray)(poly, lo, hi, bits) for lo, hi in spans)
    else:
        spans = _spans(math.ceil(total / NARY_CHUNK), workers)
        tasks = (delayed(_scan_mixed_radix)(poly, lo, hi, total) for lo, hi in spans)
    partials = Parallel(n_jobs=len(spans), backend="loky")(tasks)

    _, optimizer = reduce(_better, partials)
    elapsed = time.perf_counter() - started
    logger.info("Brute force finished in %.3fs", elapsed)
    return OracleResult(
        optimum=poly.evaluate(optimizer),
        optimizer=optimizer,
        enumerated=total,
        wall_time_s=elapsed,
        workers=workers,
    )


def brute_force_tsp(instance, cap=DEFAULT_TSP_CITY_CAP):
    """
    Shortest closed tour. City 0 is fixed first and each tour is counted
    once per direction, so ``(n_c - 1)! / 2`` orders are enumerated.
    """
    nc = instance.size
    if nc > cap:
        raise OracleCapError(
            f"TSP brute force over {nc} cities exceeds the cap of {cap} cities.",
            work=math.factorial(nc - 1) // 2,
        )
    started = time.perf_counter()
    dist = instance.distances().tolist()
    best_length = math.inf
    best_route = None
    count = 0
    for order in permutations(range(1, nc)):
        if order[0] > order[-1]:
            continue
        count += 1
        length = dist[0][order[0]] + dist[order[-1]][0]
        for a, b in zip(order, order[1:]):
            length += dist[a][b]
        if length < best_length - TIE_TOLERANCE:
            best_length = length
            best_route = (0,) + order
    return OracleResult(
        optimum=best_length,
        optimizer=best_route,
        enumerated=count,
        wall_time_s=time.perf_counter() - started,
        workers=1,
    )


_PAULI_MATRICES = {
    "I": sp.identity(2, dtype=complex, format="csr"),
    "X": sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex)),
    "Y": sp.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=complex)),
    "Z": sp.csr_matrix(np.array([[1, 0], [0, -1]], dtype=complex)),
}


def pauli_matrix(hamiltonian):
    """Sparse ``2**n`` matrix; qubit 0 is the leftmost tensor factor."""
    dim = 2 ** hamiltonian.n
    matrix = sp.csr_matrix((dim, dim), dtype=complex)
    for coeff, label in hamiltonian.terms:
        factors = [_PAULI_MATRICES[ch] for ch in label]
        matrix = matrix + coeff * reduce(
            lambda a, b: sp.kron(a, b, format="csr"), factors
        )
    return matrix


def _diagonal(hamiltonian):
    dim = 2 ** hamiltonian.n
    index = np.arange(dim)
    diagonal = np.zeros(dim)
    for coeff, label in hamiltonian.terms:
        parity = np.zeros(dim, dtype=np.int64)
        for q, ch in enumerate(label):
            if ch == "Z":
                parity ^= (index >> (hamiltonian.n - 1 - q)) & 1
        diagonal += coeff * (1 - 2 * parity)
    return diagonal


def dense_min_eigenvalue(hamiltonian, cap=DEFAULT_EIGEN_QUBIT_CAP):
    """Smallest eigenvalue of a Pauli sum (exact ground-state energy)."""
    if hamiltonian.n > cap:
        raise OracleCapError(
            f"Eigen-decomposition of {hamiltonian.n} qubits exceeds the cap of "
            f"{cap} qubits.",
            work=4 ** hamiltonian.n,
        )
    if hamiltonian.is_diagonal:
        return float(_diagonal(hamiltonian).min())
    matrix = pauli_matrix(hamiltonian)
    if hamiltonian.n <= _DENSE_EIGEN_QUBITS:
        values = eigh(matrix.toarray(), eigvals_only=True, subset_by_index=[0, 0])
        return float(values[0])
    start = make_rng(0, "lanczos").normal(size=matrix.shape[0]).astype(complex)
    values = eigsh(
        matrix, k=1, which="SA", tol=1e-10, v0=start, return_eigenvectors=False
    )
    return float(values[0].real)
