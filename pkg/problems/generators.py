"""
Random problem families: fully connected QUBOs, higher-order / N-ary
polynomials and Max-Cut graphs. Every generator is a pure function of its
arguments and seed.
"""
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from django.core.exceptions import ValidationError

from .polynomial import Polynomial
from .rng import make_rng


def _random_terms(n, k, rng):
    terms = {}
    for r in range(1, k + 1):
        keys = list(combinations(range(n), r))
        coeffs = rng.uniform(-1.0, 1.0, size=len(keys))
        terms.update(zip(keys, coeffs.tolist()))
    return terms


def gen_qubo(n, seed):
    """Fully connected QUBO: one U[-1, 1] coefficient per singleton and pair."""
    if n < 1:
        raise ValidationError("QUBO needs n >= 1.", code="invalid_n")
    rng = make_rng(seed, "qubo")
    return Polynomial(n, _random_terms(n, min(2, n), rng), arity=2, max_order=2)


def gen_higher_order(n, k, arity, seed):
    """One U[-1, 1] coefficient for every subset of size 1..k (T(n, k) terms)."""
    if not 1 <= k <= n:
        raise ValidationError(
            "Interaction order must satisfy 1 <= k <= n (k=%(k)s, n=%(n)s).",
            code="invalid_order",
            params={"k": k, "n": n},
        )
    rng = make_rng(seed, "higher_order")
    return Polynomial(n, _random_terms(n, k, rng), arity=arity, max_order=k)


@dataclass(frozen=True)
class MaxCutGraph:
    n: int
    edges: tuple

    def cut_size(self, assignment):
        x = np.asarray(assignment)
        return sum(int(x[i] != x[j]) for i, j in self.edges)

    def to_polynomial(self):
        """
        ``-sum_{(i,j)} (x_i + x_j - 2 x_i x_j)``: minimizing it maximizes the
        cut and the cut size of ``x`` equals minus its value.
        """
        terms = {}
        for i, j in self.edges:
            terms[(i,)] = terms.get((i,), 0.0) - 1.0
            terms[(j,)] = terms.get((j,), 0.0) - 1.0
            terms[(i, j)] = terms.get((i, j), 0.0) + 2.0
        return Polynomial(self.n, terms, arity=2, max_order=2)


def maxcut_edge_count(n):
    return n * (n - 1) // 8


def gen_maxcut(n, seed):
    """Graph with floor(n(n-1)/8) distinct edges drawn without replacement."""
    count = maxcut_edge_count(n)
    if n < 2 or count < 1:
        raise ValidationError(
            "Max-Cut needs n >= 2 with at least one edge (n=%(n)s).",
            code="invalid_n",
            params={"n": n},
        )
    rng = make_rng(seed, "maxcut")
    pairs = list(combinations(range(n), 2))
    chosen = np.sort(rng.choice(len(pairs), size=count, replace=False))
    graph = MaxCutGraph(n=n, edges=tuple(pairs[i] for i in chosen))
    return graph, graph.to_polynomial()
