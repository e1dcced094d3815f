"""
Real-weighted Pauli sums (cost Hamiltonians) and their text format.

Text format: one ``<coefficient> <pauli string>`` per line, ``#`` starts a
comment. All strings must have the same length ``n``; qubit 0 is the
leftmost letter.
"""
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from django.core.exceptions import ValidationError

from .constants import PAULI_LETTERS
from .rng import make_rng


@dataclass(frozen=True)
class PauliSum:
    n: int
    terms: tuple

    def __post_init__(self):
        clean = []
        for coeff, label in self.terms:
            label = str(label).upper()
            if len(label) != self.n:
                raise ValidationError(
                    "Pauli string %(label)s has length %(got)s, expected %(n)s.",
                    code="inconsistent_length",
                    params={"label": label, "got": len(label), "n": self.n},
                )
            if set(label) - set(PAULI_LETTERS):
                raise ValidationError(
                    "Pauli string %(label)s contains letters outside IXYZ.",
                    code="invalid_letter",
                    params={"label": label},
                )
            clean.append((float(coeff), label))
        object.__setattr__(self, "terms", tuple(clean))

    @cached_property
    def codes(self):
        """``(terms, n)`` matrix of letter codes (0=I, 1=X, 2=Y, 3=Z)."""
        return np.asarray(
            [[PAULI_LETTERS.index(ch) for ch in label] for _, label in self.terms],
            dtype=np.intp,
        ).reshape(len(self.terms), self.n)

    @cached_property
    def coefficients(self):
        return np.asarray([coeff for coeff, _ in self.terms], dtype=float)

    @property
    def is_diagonal(self):
        return all(set(label) <= {"I", "Z"} for _, label in self.terms)

    def to_text(self):
        return "".join(f"{coeff!r} {label}\n" for coeff, label in self.terms)


def _parse_coefficient(token, lineno):
    try:
        return float(token)
    except ValueError:
        pass
    try:
        value = complex(token)
    except ValueError:
        raise ValidationError(
            "Line %(line)s: cannot parse coefficient %(token)r.",
            code="parse_error",
            params={"line": lineno, "token": token},
        ) from None
    if value.imag != 0.0:
        raise ValidationError(
            "Line %(line)s: coefficient %(token)s is not real.",
            code="non_real",
            params={"line": lineno, "token": token},
        )
    return value.real


def parse_pauli_file(text):
    terms = []
    n = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(
                "Line %(line)s: expected '<coefficient> <pauli string>'.",
                code="parse_error",
                params={"line": lineno},
            )
        coeff = _parse_coefficient(parts[0], lineno)
        if not math.isfinite(coeff):
            raise ValidationError(
                "Line %(line)s: coefficient is not finite.",
                code="parse_error",
                params={"line": lineno},
            )
        label = parts[1].upper()
        if n is None:
            n = len(label)
        elif len(label) != n:
            raise ValidationError(
                "Line %(line)s: Pauli string length %(got)s differs from %(n)s.",
                code="inconsistent_length",
                params={"line": lineno, "got": len(label), "n": n},
            )
        if set(label) - set(PAULI_LETTERS):
            raise ValidationError(
                "Line %(line)s: Pauli string %(label)s has letters outside IXYZ.",
                code="parse_error",
                params={"line": lineno, "label": label},
            )
        terms.append((coeff, label))
    if not terms:
        raise ValidationError("Pauli file contains no terms.", code="empty")
    return PauliSum(n=n, terms=tuple(terms))


def random_pauli_sum(n, num_terms, seed, diagonal=False):
    """Random Hamiltonian with U[-1, 1] weights (``I``/``Z`` only if diagonal)."""
    rng = make_rng(seed, "pauli")
    letters = "IZ" if diagonal else PAULI_LETTERS
    codes = rng.integers(0, len(letters), size=(num_terms, n))
    coeffs = rng.uniform(-1.0, 1.0, size=num_terms)
    return PauliSum(
        n=n,
        terms=tuple(
            (float(c), "".join(letters[i] for i in row))
            for c, row in zip(coeffs, codes)
        ),
    )
