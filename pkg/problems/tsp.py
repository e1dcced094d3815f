"""
Traveling salesman front-end: random instances, the one-hot QUBO encoding
with constraint penalties, and decoding of (possibly infeasible) bitstrings
back to closed tours.
"""
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from django.core.exceptions import ValidationError

from .constants import DEFAULT_TSP_PENALTY, MIN_TSP_CITIES, TSP_COORDINATE_RANGE
from .polynomial import Polynomial
from .rng import make_rng


@dataclass(frozen=True)
class TspInstance:
    cities: tuple
    penalty: float = DEFAULT_TSP_PENALTY
    bounds: tuple = field(default=TSP_COORDINATE_RANGE)

    def __post_init__(self):
        cities = tuple((float(x), float(y)) for x, y in self.cities)
        if len(cities) < MIN_TSP_CITIES:
            raise ValidationError(
                "TSP needs at least %(min)s cities, got %(count)s.",
                code="too_few_cities",
                params={"min": MIN_TSP_CITIES, "count": len(cities)},
            )
        object.__setattr__(self, "cities", cities)

    @property
    def size(self):
        return len(self.cities)

    def distances(self):
        points = np.asarray(self.cities)
        diff = points[:, np.newaxis, :] - points[np.newaxis, :, :]
        return np.linalg.norm(diff, axis=2)

    def to_dict(self):
        return {"cities": [list(c) for c in self.cities], "penalty": self.penalty}

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                cities=tuple(tuple(c) for c in data["cities"]),
                penalty=data.get("penalty", DEFAULT_TSP_PENALTY),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(
                "Malformed TSP JSON: %(error)s",
                code="malformed_tsp",
                params={"error": exc},
            ) from exc


def gen_tsp(n_cities, seed, penalty=DEFAULT_TSP_PENALTY):
    low, high = TSP_COORDINATE_RANGE
    rng = make_rng(seed, "tsp")
    points = rng.uniform(low, high, size=(n_cities, 2))
    return TspInstance(cities=tuple(map(tuple, points.tolist())), penalty=penalty)


def route_length(route, cities):
    """Length of the closed tour visiting ``cities`` in ``route`` order."""
    points = np.asarray(cities, dtype=float)[list(route)]
    return float(np.linalg.norm(points - np.roll(points, -1, axis=0), axis=1).sum())


def variable_index(city, position, n_cities):
    return city * n_cities + position


def encode_tsp(instance):
    """
    One-hot QUBO over ``x[c, p]`` (city ``c`` at position ``p``, row-major).

    Distance terms couple consecutive positions of a closed tour; each of
    the ``2 * n_c`` one-hot constraints adds ``A * (sum - 1)**2``, whose
    constant part is kept in the polynomial offset.
    """
    nc = instance.size
    a = float(instance.penalty)
    dist = instance.distances()
    terms = {}

    def add(key, value):
        key = tuple(sorted(key))
        terms[key] = terms.get(key, 0.0) + value

    for p in range(nc):
        q = (p + 1) % nc
        for c in range(nc):
            for c2 in range(nc):
                if c != c2:
                    add(
                        (variable_index(c, p, nc), variable_index(c2, q, nc)),
                        float(dist[c, c2]),
                    )

    groups = [[variable_index(c, p, nc) for c in range(nc)] for p in range(nc)]
    groups += [[variable_index(c, p, nc) for p in range(nc)] for c in range(nc)]
    for group in groups:
        for v in group:
            add((v,), -a)
        for u, v in combinations(group, 2):
            add((u, v), 2.0 * a)

    return Polynomial(nc * nc, terms, arity=2, max_order=2, offset=2.0 * nc * a)


def is_one_hot(assignment, n_cities):
    grid = np.asarray(assignment).reshape(n_cities, n_cities)
    return bool((grid.sum(axis=0) == 1).all() and (grid.sum(axis=1) == 1).all())


def decode_tsp(assignment, n_cities):
    """
    Route (city per position) for a bitstring.

    Feasible one-hot assignments decode exactly. Otherwise each position
    takes its first set city (city 0 when none is set), and repeated cities
    are replaced by the unused ones in index order, so a permutation is
    always returned.
    """
    x = np.asarray(assignment)
    if x.size != n_cities * n_cities:
        raise ValidationError(
            "TSP assignment must have %(expected)s entries, got %(got)s.",
            code="dimension_mismatch",
            params={"expected": n_cities * n_cities, "got": x.size},
        )
    grid = x.reshape(n_cities, n_cities)
    if is_one_hot(x, n_cities):
        return tuple(int(np.argmax(grid[:, p])) for p in range(n_cities))

    picks = [int(np.argmax(grid[:, p])) for p in range(n_cities)]
    used = set()
    duplicates = []
    for p, city in enumerate(picks):
        if city in used:
            duplicates.append(p)
        else:
            used.add(city)
    spare = iter(c for c in range(n_cities) if c not in used)
    for p in duplicates:
        picks[p] = next(spare)
    return tuple(picks)
