"""
Material optical constants.

A :class:`MaterialTable` is a ``wavelength_nm,n,k`` table interpolated
linearly; queries outside the table are refused. A :class:`MaterialDb` maps
names to tables and is read-only once built.
"""
import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType

import numpy as np
from django.core.exceptions import ValidationError

from .constants import BUILTIN_GRID_NM, MATERIAL_HEADER, PALETTE
from .dispersion import BUILTIN_MATERIALS, builtin_index

logger = logging.getLogger(__name__)


def grid(lo, hi, step):
    """Inclusive wavelength grid ``lo, lo + step, ..., hi``."""
    count = int(round((hi - lo) / step)) + 1
    return lo + step * np.arange(count)


def _strictly_increasing(values):
    return values.ndim == 1 and values.size >= 2 and bool(np.all(np.diff(values) > 0))


@dataclass(frozen=True, eq=False)
class MaterialTable:
    name: str
    wavelengths: np.ndarray
    n: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        wavelengths = np.asarray(self.wavelengths, dtype=float)
        n = np.asarray(self.n, dtype=float)
        k = np.asarray(self.k, dtype=float)
        if not _strictly_increasing(wavelengths):
            raise ValidationError(
                "Material %(name)s: wavelengths must be strictly increasing.",
                code="invalid_material",
                params={"name": self.name},
            )
        if n.shape != wavelengths.shape or k.shape != wavelengths.shape:
            raise ValidationError(
                "Material %(name)s: columns have different lengths.",
                code="invalid_material",
                params={"name": self.name},
            )
        if np.any(n <= 0) or np.any(k < 0):
            raise ValidationError(
                "Material %(name)s: needs n > 0 and k >= 0.",
                code="invalid_material",
                params={"name": self.name},
            )
        for attr, value in (("wavelengths", wavelengths), ("n", n), ("k", k)):
            value.setflags(write=False)
            object.__setattr__(self, attr, value)

    @property
    def span(self):
        return float(self.wavelengths[0]), float(self.wavelengths[-1])

    def covers(self, wavelengths):
        lo, hi = self.span
        wavelengths = np.asarray(wavelengths, dtype=float)
        return bool(np.all((wavelengths >= lo) & (wavelengths <= hi)))

    def nk(self, wavelengths):
        """Interpolated ``(n, k)``; refuses wavelengths outside the table."""
        if not self.covers(wavelengths):
            lo, hi = self.span
            raise ValidationError(
                "Wavelength outside %(name)s data (%(lo)s-%(hi)s nm).",
                code="out_of_range",
                params={"name": self.name, "lo": lo, "hi": hi},
            )
        return (
            np.interp(wavelengths, self.wavelengths, self.n),
            np.interp(wavelengths, self.wavelengths, self.k),
        )

    def index(self, wavelengths):
        """Complex index written ``n - i k`` (attenuating for k >= 0)."""
        n, k = self.nk(wavelengths)
        return n - 1j * k

    @classmethod
    def constant(cls, name, n, k=0.0, span=BUILTIN_GRID_NM[:2]):
        wavelengths = np.asarray(span, dtype=float)
        return cls(name, wavelengths, np.full(2, float(n)), np.full(2, float(k)))

    @classmethod
    def builtin(cls, name, wavelengths=None):
        wavelengths = grid(*BUILTIN_GRID_NM) if wavelengths is None else wavelengths
        return cls(
            name,
            wavelengths,
            builtin_index(name, wavelengths),
            np.zeros(len(wavelengths)),
        )

    @classmethod
    def from_csv(cls, path, name=None):
        path = Path(path)
        name = name or path.stem
        try:
            with open(path, newline="", encoding="utf-8") as handle:
                reader = csv.DictReader(handle)
                if reader.fieldnames != MATERIAL_HEADER:
                    raise ValidationError(
                        "Material file %(path)s must have header %(header)s.",
                        code="malformed_material",
                        params={"path": path, "header": ",".join(MATERIAL_HEADER)},
                    )
                rows = [
                    (float(r["wavelength_nm"]), float(r["n"]), float(r["k"]))
                    for r in reader
                ]
        except (OSError, ValueError, TypeError) as exc:
            raise ValidationError(
                "Cannot read material file %(path)s: %(error)s",
                code="malformed_material",
                params={"path": path, "error": exc},
            ) from exc
        if not rows:
            raise ValidationError(
                "Material file %(path)s has no rows.",
                code="malformed_material",
                params={"path": path},
            )
        columns = np.asarray(rows).T
        return cls(name, columns[0], columns[1], columns[2])

    def to_csv(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(MATERIAL_HEADER)
            for row in zip(self.wavelengths, self.n, self.k):
                writer.writerow([repr(float(v)) for v in row])
        return path


class MaterialDb:
    def __init__(self, tables, palette=PALETTE):
        self._tables = MappingProxyType({t.name: t for t in tables})
        self.palette = tuple(palette)

    def __contains__(self, name):
        return name in self._tables

    def __iter__(self):
        return iter(self._tables.values())

    @property
    def names(self):
        return tuple(self._tables)

    def get(self, name):
        try:
            return self._tables[name]
        except KeyError:
            raise ValidationError(
                "Unknown material %(name)s (known: %(known)s).",
                code="unknown_material",
                params={"name": name, "known": ", ".join(self._tables)},
            ) from None

    def check_palette(self):
        missing = [name for name in self.palette if name not in self]
        if missing:
            raise ValidationError(
                "Material database lacks palette materials %(missing)s.",
                code="unknown_material",
                params={"missing": ", ".join(missing)},
            )
        return self

    @classmethod
    def builtin(cls, wavelengths=None):
        return cls(
            MaterialTable.builtin(name, wavelengths) for name in BUILTIN_MATERIALS
        )

    @classmethod
    def from_directory(cls, directory, palette=PALETTE):
        """Every ``*.csv`` in ``directory``; built-in tables fill the gaps."""
        directory = Path(directory)
        if not directory.is_dir():
            raise ValidationError(
                "Materials directory %(path)s does not exist.",
                code="missing_materials",
                params={"path": directory},
            )
        tables = {t.name: t for t in cls.builtin()}
        for path in sorted(directory.glob("*.csv")):
            tables[path.stem] = MaterialTable.from_csv(path)
            logger.info("Loaded material %s from %s", path.stem, path)
        return cls(tables.values(), palette)

    def export(self, directory):
        return [t.to_csv(Path(directory) / f"{t.name}.csv") for t in self]
