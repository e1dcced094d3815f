"""
Sparse multilinear cost polynomials.

A :class:`Polynomial` is ``offset + sum_S c_S * prod_{i in S} x_i`` over
``n`` variables with domain ``{0..N-1}``. QUBO, Max-Cut, TSP, higher-order
and N-ary problems all share this representation; at ``N = 2`` it is a
PUBO. Terms are keyed by strictly ascending index tuples.
"""
import math
from functools import cached_property

import numpy as np
from django.core.exceptions import ValidationError

# Rows x terms x order elements materialised per evaluate_many chunk.
_EVAL_BUDGET = 2_000_000


def interaction_count(n, k):
    """T(n, k): number of distinct subsets of size 1..k among n variables."""
    return sum(math.comb(n, r) for r in range(1, k + 1))


class Polynomial:
    def __init__(self, n, terms, arity=2, max_order=None, offset=0.0):
        if int(n) < 1:
            raise ValidationError(
                "Polynomial needs at least one variable (n=%(n)s).",
                code="invalid_n",
                params={"n": n},
            )
        if int(arity) < 2:
            raise ValidationError(
                "Variable arity must be at least 2 (N=%(arity)s).",
                code="invalid_arity",
                params={"arity": arity},
            )
        self.n = int(n)
        self.arity = int(arity)
        self.offset = float(offset)

        clean = {}
        for key, coeff in terms.items():
            key = tuple(int(i) for i in key)
            if not key:
                raise ValidationError("Empty term; use offset.", code="empty_term")
            if any(b <= a for a, b in zip(key, key[1:])):
                raise ValidationError(
                    "Term %(key)s is not strictly ascending.",
                    code="unsorted_term",
                    params={"key": key},
                )
            if key[0] < 0 or key[-1] >= self.n:
                raise ValidationError(
                    "Term %(key)s references a variable outside 0..%(last)s.",
                    code="index_out_of_range",
                    params={"key": key, "last": self.n - 1},
                )
            try:
                coeff = float(coeff)
            except (TypeError, ValueError) as exc:
                raise ValidationError(
                    "Term %(key)s has a non-numeric coefficient %(coeff)r.",
                    code="malformed_polynomial",
                    params={"key": key, "coeff": coeff},
                ) from exc
            if not math.isfinite(coeff):
                raise ValidationError(
                    "Term %(key)s has a non-finite coefficient.",
                    code="non_finite",
                    params={"key": key},
                )
            clean[key] = clean.get(key, 0.0) + coeff
        self.terms = dict(sorted(clean.items(), key=lambda kv: (len(kv[0]), kv[0])))

        observed = max((len(key) for key in self.terms), default=1)
        self.max_order = int(max_order) if max_order is not None else observed
        if observed > self.max_order:
            raise ValidationError(
                "Term order %(observed)s exceeds max_order %(k)s.",
                code="order_exceeded",
                params={"observed": observed, "k": self.max_order},
            )

    def __repr__(self):
        return (
            f"Polynomial(n={self.n}, N={self.arity}, k={self.max_order}, "
            f"terms={self.term_count}, offset={self.offset})"
        )

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (
            self.n == other.n
            and self.arity == other.arity
            and self.max_order == other.max_order
            and self.offset == other.offset
            and self.terms == other.terms
        )

    def __getstate__(self):
        state = self.__dict__.copy()
        for cached in ("_blocks", "_incidence", "_quadratic"):
            state.pop(cached, None)
        return state

    @property
    def term_count(self):
        return len(self.terms)

    @cached_property
    def _blocks(self):
        """Per-order ``(index matrix, coefficient vector)`` pairs."""
        by_order = {}
        for key, coeff in self.terms.items():
            by_order.setdefault(len(key), ([], []))
            by_order[len(key)][0].append(key)
            by_order[len(key)][1].append(coeff)
        return [
            (np.asarray(keys, dtype=np.intp), np.asarray(coeffs, dtype=float))
            for _, (keys, coeffs) in sorted(by_order.items())
        ]

    def check_assignment(self, assignment):
        x = np.asarray(assignment)
        if x.shape[-1] != self.n:
            raise ValidationError(
                "Assignment length %(got)s does not match n=%(n)s.",
                code="dimension_mismatch",
                params={"got": x.shape[-1], "n": self.n},
            )
        return x

    def evaluate(self, assignment):
        """Exact value of one assignment (integer labels)."""
        x = self.check_assignment(assignment).astype(float)
        return float(self.evaluate_many(x[np.newaxis, :])[0])

    def evaluate_many(self, assignments):
        """Exact values of a ``(S, n)`` batch of assignments."""
        x = np.asarray(self.check_assignment(assignments), dtype=float)
        values = np.full(x.shape[0], self.offset)
        for idx, coeff in self._blocks:
            rows = max(1, _EVAL_BUDGET // idx.size)
            for start in range(0, x.shape[0], rows):
                part = x[start:start + rows]
                values[start:start + rows] += part[:, idx].prod(axis=2) @ coeff
        return values

    def expectation(self, means):
        """Value with every variable replaced by its (independent) mean."""
        mu = np.asarray(means, dtype=float)
        total = self.offset
        for idx, coeff in self._blocks:
            total += float(coeff @ mu[idx].prod(axis=1))
        return total

    @cached_property
    def _quadratic(self):
        linear = np.zeros(self.n)
        coupling = np.zeros((self.n, self.n))
        for key, coeff in self.terms.items():
            if len(key) == 1:
                linear[key[0]] += coeff
            else:
                i, j = key
                coupling[i, j] += coeff
                coupling[j, i] += coeff
        return linear, coupling

    def quadratic_form(self):
        """``(linear, symmetric coupling)`` for polynomials of order <= 2."""
        if self.max_order > 2 and any(len(key) > 2 for key in self.terms):
            raise ValidationError(
                "quadratic_form needs max_order <= 2.", code="order_exceeded"
            )
        return self._quadratic

    @cached_property
    def _incidence(self):
        width = max(1, self.max_order - 1)
        rows = [([], []) for _ in range(self.n)]
        for key, coeff in self.terms.items():
            for j in key:
                others = [i for i in key if i != j]
                others += [self.n] * (width - len(others))
                rows[j][0].append(coeff)
                rows[j][1].append(others)
        return [
            (
                np.asarray(coeffs, dtype=float),
                np.asarray(others, dtype=np.intp).reshape(-1, width),
            )
            for coeffs, others in rows
        ]

    def incidence(self):
        """
        Per variable ``j``: coefficients of the terms containing ``j`` and the
        other member indices, padded with ``n`` (index of a constant 1 slot).
        """
        return self._incidence

    def to_dict(self):
        return {
            "n": self.n,
            "N": self.arity,
            "k": self.max_order,
            "offset": self.offset,
            "terms": [
                {"vars": list(key), "coeff": coeff} for key, coeff in self.terms.items()
            ],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            terms = {tuple(term["vars"]): term["coeff"] for term in data["terms"]}
            return cls(
                n=data["n"],
                terms=terms,
                arity=data.get("N", 2),
                max_order=data.get("k"),
                offset=data.get("offset", 0.0),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(
                "Malformed problem JSON: %(error)s",
                code="malformed_problem",
                params={"error": exc},
            ) from exc
