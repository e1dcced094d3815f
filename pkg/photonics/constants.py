# Two-bit codes, big-endian within each pair: 00, 01, 10, 11.
PALETTE = ("SiO2", "Si3N4", "Al2O3", "TiO2")

BUILTIN_GRID_NM = (250.0, 2600.0, 5.0)
FOM_GRID_NM = (300.0, 2500.0, 5.0)

DEFAULT_VISIBLE_BAND = (400.0, 700.0)
DEFAULT_TOTAL_THICKNESS_NM = 1200.0
DEFAULT_CAP_MATERIAL = "PDMS"
DEFAULT_CAP_THICKNESS_NM = 40000.0
DEFAULT_SUBSTRATE = "SiO2"
DEFAULT_INCIDENT_INDEX = 1.0

FOM_SCALE = 10.0
OVERSHOOT_TOLERANCE = 1e-9

SUN_TEMPERATURE_K = 5778.0
SUN_RADIUS_M = 6.957e8
ASTRONOMICAL_UNIT_M = 1.495978707e11

MATERIAL_HEADER = ["wavelength_nm", "n", "k"]
SPECTRUM_HEADER = ["wavelength_nm", "irradiance"]
TRANSMISSION_HEADER = ["wavelength_nm", "transmittance", "reflectance", "irradiance"]
