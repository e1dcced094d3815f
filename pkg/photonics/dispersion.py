"""
Built-in refractive-index models (wavelengths in nm, lossless).

Sellmeier fits: SiO2 (Malitson 1965), Si3N4 (Luke et al. 2015), Al2O3
(Malitson and Dodge 1972, ordinary ray), TiO2 (Devore 1951, ordinary ray).
Each formula is held at its boundary value outside the fitted range.
"""
import numpy as np

# name: ((B, C in um^2), ...), fitted range in um
SELLMEIER = {
    "SiO2": (
        (
            (0.6961663, 0.0684043**2),
            (0.4079426, 0.1162414**2),
            (0.8974794, 9.896161**2),
        ),
        (0.21, 6.7),
    ),
    "Si3N4": (
        ((3.0249, 0.1353406**2), (40314.0, 1239.842**2)),
        (0.31, 5.504),
    ),
    "Al2O3": (
        (
            (1.4313493, 0.0726631**2),
            (0.65054713, 0.1193242**2),
            (5.3414021, 18.028251**2),
        ),
        (0.2, 5.0),
    ),
}

TIO2_RANGE_UM = (0.43, 1.53)

CONSTANT_INDEX = {"PDMS": 1.40}


def _microns(wavelength_nm, valid):
    return np.clip(np.asarray(wavelength_nm, dtype=float) / 1000.0, *valid)


def sellmeier_index(name, wavelength_nm):
    terms, valid = SELLMEIER[name]
    lam2 = _microns(wavelength_nm, valid) ** 2
    n2 = 1.0 + sum(b * lam2 / (lam2 - c) for b, c in terms)
    return np.sqrt(n2)


def tio2_index(wavelength_nm):
    lam2 = _microns(wavelength_nm, TIO2_RANGE_UM) ** 2
    return np.sqrt(5.913 + 0.2441 / (lam2 - 0.0803))


def builtin_index(name, wavelength_nm):
    if name in SELLMEIER:
        return sellmeier_index(name, wavelength_nm)
    if name == "TiO2":
        return tio2_index(wavelength_nm)
    return np.full(np.shape(wavelength_nm), CONSTANT_INDEX[name], dtype=float)


BUILTIN_MATERIALS = tuple(SELLMEIER) + ("TiO2",) + tuple(CONSTANT_INDEX)
