"""
Problem, reference and result files (JSON).

Problem JSON: ``{"n", "N", "k", "offset", "terms": [{"vars", "coeff"}]}``
plus an optional ``family`` tag (and ``edges`` for Max-Cut). TSP JSON:
``{"cities": [[x, y], ...], "penalty"}``.
"""
import json
from dataclasses import dataclass
from pathlib import Path

from django.core.exceptions import ValidationError

from ..enums import ProblemFamily
from ..generators import MaxCutGraph
from ..polynomial import Polynomial
from ..tsp import TspInstance, encode_tsp


@dataclass
class ProblemBundle:
    family: str
    polynomial: Polynomial
    tsp: TspInstance = None
    graph: MaxCutGraph = None

    def to_dict(self):
        if self.tsp is not None:
            data = self.tsp.to_dict()
        else:
            data = self.polynomial.to_dict()
            if self.graph is not None:
                data["edges"] = [list(edge) for edge in self.graph.edges]
        data["family"] = str(self.family)
        return data


def infer_family(polynomial):
    if polynomial.arity > 2:
        return ProblemFamily.NARY
    if polynomial.max_order > 2:
        return ProblemFamily.HIGHER_ORDER
    return ProblemFamily.QUBO


def read_json(path):
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(
            "Cannot read JSON file %(path)s: %(error)s",
            code="unreadable",
            params={"path": path, "error": exc},
        ) from exc


def write_json(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(data, handle, indent=2)
        handle.write("\n")
    return path


def bundle_from_dict(data):
    if "cities" in data:
        instance = TspInstance.from_dict(data)
        return ProblemBundle(ProblemFamily.TSP, encode_tsp(instance), tsp=instance)
    polynomial = Polynomial.from_dict(data)
    family = data.get("family") or infer_family(polynomial)
    if family not in ProblemFamily.values:
        raise ValidationError(
            "Unknown problem family %(family)s.",
            code="unknown_family",
            params={"family": family},
        )
    graph = None
    if data.get("edges"):
        graph = MaxCutGraph(n=polynomial.n, edges=tuple(map(tuple, data["edges"])))
    return ProblemBundle(ProblemFamily(family), polynomial, graph=graph)


def load_problem(path):
    return bundle_from_dict(read_json(path))


def load_reference(path):
    """Reference optimum from an oracle result (``optimum``) or ``{"reference"}``."""
    data = read_json(path)
    for key in ("optimum", "reference", "best_cost"):
        if isinstance(data, dict) and data.get(key) is not None:
            return float(data[key])
    raise ValidationError(
        "Reference file %(path)s has no optimum/reference value.",
        code="malformed_reference",
        params={"path": path},
    )
