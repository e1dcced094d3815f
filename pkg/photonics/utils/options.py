"""Flags that describe a window design problem (``photonic`` and ``solve``)."""
import logging

from django.conf import settings
from django.core.exceptions import ValidationError

from problems.enums import ProblemFamily
from variational.evaluator import BlackBoxCost

from ..constants import (
    DEFAULT_CAP_MATERIAL,
    DEFAULT_CAP_THICKNESS_NM,
    DEFAULT_SUBSTRATE,
    DEFAULT_TOTAL_THICKNESS_NM,
    DEFAULT_VISIBLE_BAND,
    FOM_GRID_NM,
)
from ..fom import WindowFom
from ..materials import MaterialDb, grid
from ..spectrum import Spectrum, blackbody_solar
from ..tmm import Layer

logger = logging.getLogger(__name__)


def parse_band(text):
    """``"400:700"`` -> ``(400.0, 700.0)``."""
    try:
        lo, hi = (float(v) for v in str(text).split(":"))
    except ValueError:
        raise ValidationError(
            "Band %(text)s must look like lo:hi (nm).",
            code="invalid_band",
            params={"text": text},
        ) from None
    return lo, hi


def add_photonic_arguments(parser):
    parser.add_argument("--materials", help="Directory of wavelength_nm,n,k CSVs")
    parser.add_argument("--spectrum", help="Solar spectrum CSV")
    parser.add_argument(
        "--visible",
        default="{:g}:{:g}".format(*DEFAULT_VISIBLE_BAND),
        help="Visible band lo:hi in nm",
    )
    parser.add_argument(
        "--total-thickness", type=float, default=DEFAULT_TOTAL_THICKNESS_NM
    )
    parser.add_argument(
        "--cap-thickness",
        type=float,
        nargs="?",
        const=DEFAULT_CAP_THICKNESS_NM,
        help=f"Add a {DEFAULT_CAP_MATERIAL} cap (nm) in front of the stack",
    )
    parser.add_argument("--substrate", default=DEFAULT_SUBSTRATE)


def load_materials(options):
    directory = options.get("materials") or settings.DVQOA_MATERIALS_DIR
    if directory:
        return MaterialDb.from_directory(directory)
    return MaterialDb.builtin()


def load_spectrum(options, wavelengths):
    path = options.get("spectrum") or settings.DVQOA_SOLAR_SPECTRUM
    if path:
        return Spectrum.from_csv(path)
    logger.info("No solar spectrum given, using the blackbody approximation")
    return blackbody_solar(wavelengths)


def build_window_cost(layers, options):
    """``(BlackBoxCost, problem summary)`` for a ``layers``-layer window."""
    if layers is None or layers < 1:
        raise ValidationError(
            "The window needs at least one layer.", code="invalid_layers"
        )
    wavelengths = grid(*FOM_GRID_NM)
    cap = None
    if options.get("cap_thickness"):
        cap = Layer(DEFAULT_CAP_MATERIAL, options["cap_thickness"])
    fom = WindowFom(
        load_materials(options),
        load_spectrum(options, wavelengths),
        wavelengths,
        visible_band=parse_band(options["visible"]),
        total_thickness=options["total_thickness"],
        exit_medium=options["substrate"],
        cap=cap,
    )
    cost = BlackBoxCost(fom, n=2 * layers, family=ProblemFamily.PHOTONIC)
    problem = {
        "family": str(ProblemFamily.PHOTONIC),
        "layers": layers,
        "n": 2 * layers,
        "palette": list(fom.db.palette),
        "visible_band": list(fom.visible_band),
        "total_thickness_nm": fom.total_thickness,
        "substrate": options["substrate"],
        "cap": None if cap is None else [cap.material, cap.thickness_nm],
        "materials": options.get("materials") or settings.DVQOA_MATERIALS_DIR,
        "spectrum": options.get("spectrum") or settings.DVQOA_SOLAR_SPECTRUM,
    }
    return cost, problem
