"""
Energy-saving window figure of merit.

A bitstring of length ``2 L`` selects one palette material per layer (two
bits per layer, big-endian); all layers share the total thickness equally.
The FOM compares transmitted solar irradiance ``T S`` with an ideal window
that passes ``S`` inside the visible band and nothing outside:

    FOM = 10 * trapz((T S - S ideal)**2) / trapz(S**2)

Band membership is half-open, ``lo <= lambda < hi``.
"""
import csv
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from scipy.integrate import trapezoid

from .constants import (
    DEFAULT_INCIDENT_INDEX,
    DEFAULT_SUBSTRATE,
    DEFAULT_TOTAL_THICKNESS_NM,
    DEFAULT_VISIBLE_BAND,
    FOM_SCALE,
    TRANSMISSION_HEADER,
)
from .tmm import Layer, Stack, stack_response


def decode_bits(bits, palette):
    bits = [int(b) for b in np.asarray(bits).reshape(-1)]
    if len(bits) % 2:
        raise ValidationError(
            "Photonic bitstring needs an even length (got %(count)s).",
            code="odd_bits",
            params={"count": len(bits)},
        )
    if set(bits) - {0, 1}:
        raise ValidationError("Photonic bitstring must be binary.", code="not_binary")
    return [palette[2 * hi + lo] for hi, lo in zip(bits[::2], bits[1::2])]


def build_stack(
    bits,
    palette,
    total_thickness=DEFAULT_TOTAL_THICKNESS_NM,
    incident=DEFAULT_INCIDENT_INDEX,
    exit_medium=DEFAULT_SUBSTRATE,
    cap=None,
):
    materials = decode_bits(bits, palette)
    thickness = float(total_thickness) / max(len(materials), 1)
    layers = tuple(Layer(name, thickness) for name in materials)
    return Stack(layers=layers, incident=incident, exit_medium=exit_medium, cap=cap)


def ideal_window(wavelengths, band=DEFAULT_VISIBLE_BAND):
    lo, hi = band
    if not lo < hi:
        raise ValidationError(
            "Visible band %(lo)s:%(hi)s is empty.",
            code="invalid_band",
            params={"lo": lo, "hi": hi},
        )
    wavelengths = np.asarray(wavelengths, dtype=float)
    return ((wavelengths >= lo) & (wavelengths < hi)).astype(float)


def fom_from_transmittance(transmittance, irradiance, wavelengths, band):
    irradiance = np.asarray(irradiance, dtype=float)
    designed = np.asarray(transmittance, dtype=float) * irradiance
    ideal = irradiance * ideal_window(wavelengths, band)
    denominator = trapezoid(irradiance**2, wavelengths)
    if not denominator > 0:
        raise ValidationError(
            "Solar spectrum is zero on the grid.", code="invalid_spectrum"
        )
    return FOM_SCALE * trapezoid((designed - ideal) ** 2, wavelengths) / denominator


def window_fom(
    bits,
    db,
    solar,
    wavelengths,
    visible_band=DEFAULT_VISIBLE_BAND,
    total_thickness=DEFAULT_TOTAL_THICKNESS_NM,
    **stack_options,
):
    stack = build_stack(bits, db.palette, total_thickness, **stack_options)
    transmittance, _ = stack_response(stack, wavelengths, db)
    return fom_from_transmittance(
        transmittance, solar.at(wavelengths), wavelengths, visible_band
    )


class WindowFom:
    """
    Picklable black-box cost ``bits -> FOM`` with the irradiance and the
    material indices resampled once onto the grid.
    """

    def __init__(
        self,
        db,
        solar,
        wavelengths,
        visible_band=DEFAULT_VISIBLE_BAND,
        total_thickness=DEFAULT_TOTAL_THICKNESS_NM,
        incident=DEFAULT_INCIDENT_INDEX,
        exit_medium=DEFAULT_SUBSTRATE,
        cap=None,
    ):
        self.db = db.check_palette()
        self.wavelengths = np.asarray(wavelengths, dtype=float)
        self.irradiance = solar.at(self.wavelengths)
        self.visible_band = tuple(visible_band)
        ideal_window(self.wavelengths, self.visible_band)
        self.total_thickness = float(total_thickness)
        self.stack_options = {
            "incident": incident,
            "exit_medium": exit_medium,
            "cap": cap,
        }
        # Fails early when a medium does not cover the grid.
        for bits in ([0, 0], [0, 1], [1, 0], [1, 1]):
            self.response(bits)

    def stack(self, bits):
        return build_stack(
            bits, self.db.palette, self.total_thickness, **self.stack_options
        )

    def response(self, bits):
        return stack_response(self.stack(bits), self.wavelengths, self.db)

    def __call__(self, bits):
        transmittance, _ = self.response(bits)
        return fom_from_transmittance(
            transmittance, self.irradiance, self.wavelengths, self.visible_band
        )

    def describe(self, bits):
        stack = self.stack(bits)
        return {
            "materials": [layer.material for layer in stack.layers],
            "layer_thickness_nm": stack.layers[0].thickness_nm if stack.layers else 0,
            "fom": self(bits),
        }

    def write_transmission_csv(self, bits, path):
        """Per-wavelength T, R and incident irradiance of the decoded stack."""
        transmittance, reflectance = self.response(bits)
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(TRANSMISSION_HEADER)
            for row in zip(
                self.wavelengths, transmittance, reflectance, self.irradiance
            ):
                writer.writerow([repr(float(v)) for v in row])
        return path
