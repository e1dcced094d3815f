"""
Normal-incidence characteristic-matrix (transfer-matrix) method.

Each layer contributes ``[[cos d, i sin d / N], [i N sin d, cos d]]`` with
phase ``d = 2 pi N t / lambda`` and complex index ``N = n - i k``; the stack
matrix is the product taken from the incidence side. Everything is
vectorised over wavelength.
"""
from dataclasses import dataclass, field

import numpy as np
from django.core.exceptions import ValidationError

from variational.exceptions import TransmissionError

from .constants import DEFAULT_INCIDENT_INDEX, OVERSHOOT_TOLERANCE


@dataclass(frozen=True)
class Layer:
    material: str
    thickness_nm: float

    def __post_init__(self):
        if not float(self.thickness_nm) > 0:
            raise ValidationError(
                "Layer %(material)s needs a positive thickness (got %(t)s nm).",
                code="invalid_layer",
                params={"material": self.material, "t": self.thickness_nm},
            )


@dataclass(frozen=True)
class Stack:
    """
    Layers listed from the incidence side. Media and layer materials are
    either a material name looked up in a database or a plain real index.
    ``cap`` is an optional thick layer in front of the structure (for
    example a PDMS sheet), treated coherently like any other layer.
    """

    layers: tuple = field(default_factory=tuple)
    incident: object = DEFAULT_INCIDENT_INDEX
    exit_medium: object = 1.5
    cap: Layer = None

    @property
    def all_layers(self):
        return ((self.cap,) if self.cap else ()) + tuple(self.layers)

    def reversed(self):
        """Same structure lit from the exit side."""
        return Stack(
            layers=tuple(reversed(self.all_layers)),
            incident=self.exit_medium,
            exit_medium=self.incident,
        )


def medium_index(medium, wavelengths, db=None):
    """Complex index ``n - i k`` of a named material or a real constant."""
    wavelengths = np.atleast_1d(np.asarray(wavelengths, dtype=float))
    if isinstance(medium, str):
        if db is None:
            raise ValidationError(
                "Material %(name)s needs a material database.",
                code="unknown_material",
                params={"name": medium},
            )
        return db.get(medium).index(wavelengths)
    return np.full(wavelengths.shape, complex(medium))


def characteristic_matrix(stack, wavelengths, db=None):
    """``(W, 2, 2)`` stack matrices, one per wavelength."""
    wavelengths = np.atleast_1d(np.asarray(wavelengths, dtype=float))
    total = np.broadcast_to(np.eye(2, dtype=complex), (wavelengths.size, 2, 2))
    for layer in stack.all_layers:
        index = medium_index(layer.material, wavelengths, db)
        phase = 2.0 * np.pi * index * float(layer.thickness_nm) / wavelengths
        cos, sin = np.cos(phase), np.sin(phase)
        matrix = np.empty((wavelengths.size, 2, 2), dtype=complex)
        matrix[:, 0, 0] = cos
        matrix[:, 0, 1] = 1j * sin / index
        matrix[:, 1, 0] = 1j * index * sin
        matrix[:, 1, 1] = cos
        total = total @ matrix
    return total


def _clamp(values, what):
    if not np.all(np.isfinite(values)):
        raise TransmissionError(f"Non-finite {what} from the transfer matrix.")
    low, high = values.min(), values.max()
    if low < -OVERSHOOT_TOLERANCE or high > 1.0 + OVERSHOOT_TOLERANCE:
        raise TransmissionError(
            f"{what.capitalize()} outside [0, 1] beyond tolerance "
            f"(min {low!r}, max {high!r})."
        )
    return np.clip(values, 0.0, 1.0)


def stack_response(stack, wavelengths, db=None):
    """``(T, R)`` arrays over ``wavelengths``."""
    wavelengths = np.atleast_1d(np.asarray(wavelengths, dtype=float))
    n1 = medium_index(stack.incident, wavelengths, db).real
    ns = medium_index(stack.exit_medium, wavelengths, db)
    m = characteristic_matrix(stack, wavelengths, db)
    incoming = n1 * m[:, 0, 0] + n1 * ns * m[:, 0, 1]
    outgoing = m[:, 1, 0] + ns * m[:, 1, 1]
    with np.errstate(all="ignore"):
        t = 2.0 * n1 / (incoming + outgoing)
        r = (incoming - outgoing) / (incoming + outgoing)
        transmittance = ns.real / n1 * np.abs(t) ** 2
    return (
        _clamp(transmittance, "transmittance"),
        _clamp(np.abs(r) ** 2, "reflectance"),
    )


def tmm_transmission(stack, wavelength, db=None):
    """Transmittance at one wavelength, or an array for an array of them."""
    transmittance, _ = stack_response(stack, wavelength, db)
    return float(transmittance[0]) if np.ndim(wavelength) == 0 else transmittance


def reflectance(stack, wavelength, db=None):
    _, values = stack_response(stack, wavelength, db)
    return float(values[0]) if np.ndim(wavelength) == 0 else values
