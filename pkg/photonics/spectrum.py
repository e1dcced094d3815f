"""Sampled spectra (solar irradiance in W m^-2 nm^-1, or transmittance)."""
import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from scipy import constants

from .constants import (
    ASTRONOMICAL_UNIT_M,
    SPECTRUM_HEADER,
    SUN_RADIUS_M,
    SUN_TEMPERATURE_K,
)


@dataclass(frozen=True, eq=False)
class Spectrum:
    wavelengths: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        wavelengths = np.asarray(self.wavelengths, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if wavelengths.ndim != 1 or wavelengths.size < 2 or np.any(
            np.diff(wavelengths) <= 0
        ):
            raise ValidationError(
                "Spectrum wavelengths must be strictly increasing.",
                code="invalid_spectrum",
            )
        if values.shape != wavelengths.shape:
            raise ValidationError(
                "Spectrum has %(w)s wavelengths but %(v)s values.",
                code="invalid_spectrum",
                params={"w": wavelengths.size, "v": values.size},
            )
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValidationError(
                "Spectrum values must be finite and non-negative.",
                code="invalid_spectrum",
            )
        object.__setattr__(self, "wavelengths", wavelengths)
        object.__setattr__(self, "values", values)

    @property
    def span(self):
        return float(self.wavelengths[0]), float(self.wavelengths[-1])

    def at(self, wavelengths):
        """Linear interpolation; wavelengths outside the data are refused."""
        wavelengths = np.asarray(wavelengths, dtype=float)
        lo, hi = self.span
        if np.any(wavelengths < lo) or np.any(wavelengths > hi):
            raise ValidationError(
                "Wavelength grid exceeds the spectrum data (%(lo)s-%(hi)s nm).",
                code="out_of_range",
                params={"lo": lo, "hi": hi},
            )
        return np.interp(wavelengths, self.wavelengths, self.values)

    @classmethod
    def flat(cls, wavelengths, value=1.0):
        wavelengths = np.asarray(wavelengths, dtype=float)
        return cls(wavelengths, np.full(wavelengths.shape, float(value)))

    @classmethod
    def from_csv(cls, path):
        try:
            with open(path, newline="", encoding="utf-8") as handle:
                reader = csv.DictReader(handle)
                if reader.fieldnames != SPECTRUM_HEADER:
                    raise ValidationError(
                        "Spectrum file %(path)s must have header %(header)s.",
                        code="malformed_spectrum",
                        params={"path": path, "header": ",".join(SPECTRUM_HEADER)},
                    )
                rows = [
                    (float(r["wavelength_nm"]), float(r["irradiance"])) for r in reader
                ]
        except (OSError, ValueError, TypeError) as exc:
            raise ValidationError(
                "Cannot read spectrum file %(path)s: %(error)s",
                code="malformed_spectrum",
                params={"path": path, "error": exc},
            ) from exc
        if len(rows) < 2:
            raise ValidationError(
                "Spectrum file %(path)s needs at least two rows.",
                code="malformed_spectrum",
                params={"path": path},
            )
        columns = np.asarray(rows).T
        return cls(columns[0], columns[1])

    def to_csv(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(SPECTRUM_HEADER)
            for row in zip(self.wavelengths, self.values):
                writer.writerow([repr(float(v)) for v in row])
        return path


def blackbody_solar(wavelengths, temperature=SUN_TEMPERATURE_K):
    """
    Extraterrestrial solar irradiance approximated by a blackbody at the
    Sun's effective temperature, diluted to the Earth-Sun distance.
    """
    lam = np.asarray(wavelengths, dtype=float) * 1e-9
    h, c, k = constants.h, constants.c, constants.k
    radiance = 2.0 * h * c**2 / lam**5 / np.expm1(h * c / (lam * k * temperature))
    dilution = (SUN_RADIUS_M / ASTRONOMICAL_UNIT_M) ** 2
    return Spectrum(wavelengths, np.pi * radiance * dilution * 1e-9)
