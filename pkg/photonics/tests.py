import csv
import json
import tempfile
from io import StringIO
from itertools import product
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from variational.exceptions import TransmissionError
from variational.optimizer import Trace

from .constants import FOM_GRID_NM, PALETTE, TRANSMISSION_HEADER
from .dispersion import builtin_index
from .fom import (
    WindowFom,
    build_stack,
    decode_bits,
    fom_from_transmittance,
    ideal_window,
)
from .materials import MaterialDb, MaterialTable, grid
from .spectrum import Spectrum, blackbody_solar
from .tmm import Layer, Stack, reflectance, stack_response, tmm_transmission
from .utils.options import parse_band

SYNTHETIC_PALETTE = ("L", "M", "H", "K")


def synthetic_db():
    return MaterialDb(
        [
            MaterialTable.constant("L", 1.45),
            MaterialTable.constant("M", 1.7),
            MaterialTable.constant("H", 2.0),
            MaterialTable.constant("K", 2.4, k=0.05),
        ],
        palette=SYNTHETIC_PALETTE,
    )


class TransferMatrixTests(SimpleTestCase):
    def setUp(self):
        self.db = synthetic_db()

    def test_bare_interface(self):
        stack = Stack(incident=1.0, exit_medium=1.5)
        self.assertAlmostEqual(tmm_transmission(stack, 600.0), 0.96, places=12)
        self.assertAlmostEqual(reflectance(stack, 600.0), 0.04, places=12)

    def test_half_wave_layer_is_absent(self):
        stack = Stack((Layer("H", 150.0),), incident=1.0, exit_medium=1.5)
        self.assertAlmostEqual(
            tmm_transmission(stack, 600.0, self.db), 0.96, places=10
        )

    def test_quarter_wave_layer(self):
        stack = Stack((Layer("H", 75.0),), incident=1.0, exit_medium=1.5)
        self.assertAlmostEqual(
            tmm_transmission(stack, 600.0, self.db), 0.793388, places=6
        )

    def test_lossless_stacks_conserve_energy(self):
        wavelengths = grid(*FOM_GRID_NM)
        rng = np.random.default_rng(0)
        for _ in range(100):
            names = rng.choice(["L", "M", "H"], size=int(rng.integers(1, 8)))
            layers = tuple(
                Layer(str(name), float(t))
                for name, t in zip(names, rng.uniform(20, 400, size=len(names)))
            )
            transmittance, reflected = stack_response(
                Stack(layers, exit_medium=1.5), wavelengths, self.db
            )
            np.testing.assert_allclose(transmittance + reflected, 1.0, atol=1e-10)

    def test_absorbing_layer_loses_energy(self):
        stack = Stack((Layer("K", 300.0),), exit_medium=1.5)
        transmittance, reflected = stack_response(stack, [500.0, 900.0], self.db)
        self.assertTrue(np.all(transmittance + reflected < 1.0))

    def test_transmission_is_reciprocal(self):
        stack = Stack(
            (Layer("H", 90.0), Layer("L", 140.0), Layer("K", 60.0)), exit_medium=1.5
        )
        wavelengths = np.linspace(400, 2000, 9)
        np.testing.assert_allclose(
            stack_response(stack, wavelengths, self.db)[0],
            stack_response(stack.reversed(), wavelengths, self.db)[0],
            atol=1e-10,
        )

    def test_cap_sits_in_front(self):
        cap = Layer("L", 40000.0)
        stack = Stack((Layer("H", 100.0),), cap=cap)
        self.assertEqual(stack.all_layers[0], cap)
        self.assertEqual(len(stack.all_layers), 2)

    def test_unphysical_medium_is_rejected(self):
        with self.assertRaises(TransmissionError):
            stack_response(Stack(incident=1.0, exit_medium=-1.5), [600.0])

    def test_layer_validation(self):
        with self.assertRaises(ValidationError):
            Layer("H", 0.0)
        with self.assertRaises(ValidationError):
            tmm_transmission(Stack((Layer("H", 10.0),)), 600.0)


class FigureOfMeritTests(SimpleTestCase):
    def setUp(self):
        self.wavelengths = grid(*FOM_GRID_NM)
        self.flat = np.ones_like(self.wavelengths)

    def test_ideal_window_scores_zero(self):
        window = ideal_window(self.wavelengths)
        self.assertEqual(
            fom_from_transmittance(window, self.flat, self.wavelengths, (400, 700)),
            0.0,
        )

    def test_opaque_window(self):
        value = fom_from_transmittance(
            np.zeros_like(self.wavelengths), self.flat, self.wavelengths, (400, 700)
        )
        self.assertAlmostEqual(value, 10 * 300 / 2200, places=10)

    def test_grows_with_the_distance_from_the_ideal_window(self):
        window = ideal_window(self.wavelengths)
        values = [
            fom_from_transmittance(
                (1 - error) * window + error * (1 - window),
                self.flat,
                self.wavelengths,
                (400, 700),
            )
            for error in (0.0, 0.1, 0.3, 0.6, 1.0)
        ]
        self.assertEqual(values[0], 0.0)
        self.assertTrue(np.all(np.diff(values) > 0), values)

    def test_band_is_half_open(self):
        window = ideal_window([399.0, 400.0, 699.0, 700.0])
        np.testing.assert_array_equal(window, [0, 1, 1, 0])
        with self.assertRaises(ValidationError):
            ideal_window(self.wavelengths, (700, 400))

    def test_decode_bits(self):
        self.assertEqual(
            decode_bits([0, 0, 1, 1, 0, 1], PALETTE), ["SiO2", "TiO2", "Si3N4"]
        )
        with self.assertRaises(ValidationError):
            decode_bits([0, 1, 1], PALETTE)
        with self.assertRaises(ValidationError):
            decode_bits([0, 2], PALETTE)

    def test_build_stack_splits_thickness(self):
        stack = build_stack([1, 0] * 6, SYNTHETIC_PALETTE, total_thickness=1200)
        self.assertEqual(len(stack.layers), 6)
        self.assertTrue(all(layer.thickness_nm == 200 for layer in stack.layers))
        self.assertTrue(all(layer.material == "H" for layer in stack.layers))

    def test_window_fom(self):
        spectrum = Spectrum.flat(grid(250, 2600, 50))
        fom = WindowFom(synthetic_db(), spectrum, self.wavelengths, exit_medium=1.5)
        values = {bits: fom(bits) for bits in product((0, 1), repeat=4)}
        self.assertTrue(all(v >= 0 for v in values.values()))
        described = fom.describe([0, 0, 1, 0])
        self.assertEqual(described["materials"], ["L", "H"])
        self.assertEqual(described["layer_thickness_nm"], 600)
        self.assertEqual(described["fom"], values[(0, 0, 1, 0)])

    def test_window_fom_checks_palette(self):
        db = MaterialDb([MaterialTable.constant("L", 1.45)], palette=SYNTHETIC_PALETTE)
        with self.assertRaises(ValidationError):
            WindowFom(db, Spectrum.flat(self.wavelengths), self.wavelengths)


class MaterialTests(SimpleTestCase):
    def test_interpolation(self):
        table = MaterialTable("X", [400, 600], [1.5, 2.0], [0.0, 0.1])
        n, k = table.nk(500.0)
        self.assertAlmostEqual(float(n), 1.75)
        self.assertAlmostEqual(float(k), 0.05)
        self.assertAlmostEqual(complex(table.index(500.0)), 1.75 - 0.05j)
        with self.assertRaises(ValidationError):
            table.nk(700.0)

    def test_table_validation(self):
        with self.assertRaises(ValidationError):
            MaterialTable("X", [600, 400], [1.5, 1.5], [0, 0])
        with self.assertRaises(ValidationError):
            MaterialTable("X", [400, 600], [1.5, -1.0], [0, 0])
        with self.assertRaises(ValidationError):
            synthetic_db().get("unobtainium")

    def test_csv_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            table = MaterialTable("Ta2O5", [400, 500, 600], [2.2, 2.1, 2.05], [0] * 3)
            path = table.to_csv(Path(tmp) / "Ta2O5.csv")
            loaded = MaterialTable.from_csv(path)
            self.assertEqual(loaded.name, "Ta2O5")
            np.testing.assert_array_equal(loaded.n, [2.2, 2.1, 2.05])

            db = MaterialDb.from_directory(tmp)
            self.assertIn("Ta2O5", db)
            self.assertIn("SiO2", db)

            bad = Path(tmp) / "bad.csv"
            bad.write_text("lambda,n\n500,1.5\n")
            with self.assertRaises(ValidationError):
                MaterialTable.from_csv(bad)
        with self.assertRaises(ValidationError):
            MaterialDb.from_directory(Path(tmp) / "gone")

    def test_builtin_indices(self):
        self.assertAlmostEqual(float(builtin_index("SiO2", 589.3)), 1.4584, places=3)
        self.assertAlmostEqual(
            float(builtin_index("TiO2", 300.0)), float(builtin_index("TiO2", 430.0))
        )
        db = MaterialDb.builtin()
        self.assertEqual(set(PALETTE) | {"PDMS"}, set(db.names))
        wavelengths = grid(*FOM_GRID_NM)
        self.assertTrue(all(db.get(name).covers(wavelengths) for name in PALETTE))


class SpectrumTests(SimpleTestCase):
    def test_flat_and_interpolation(self):
        spectrum = Spectrum([300, 500], [1.0, 3.0])
        self.assertAlmostEqual(float(spectrum.at(400.0)), 2.0)
        with self.assertRaises(ValidationError):
            spectrum.at([250.0])
        with self.assertRaises(ValidationError):
            Spectrum([300, 500], [1.0, -1.0])

    def test_blackbody_peak(self):
        wavelengths = grid(250, 2600, 5)
        solar = blackbody_solar(wavelengths)
        peak = wavelengths[np.argmax(solar.values)]
        self.assertTrue(480 <= peak <= 520)

    def test_parse_band(self):
        self.assertEqual(parse_band("400:700"), (400.0, 700.0))
        with self.assertRaises(ValidationError):
            parse_band("visible")


class CommandTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.spectrum = Spectrum.flat(grid(250, 2600, 50)).to_csv(
            self.dir / "flat.csv"
        )

    def tearDown(self):
        self.tmp.cleanup()

    def test_export_materials(self):
        out = StringIO()
        call_command("export_materials", out=str(self.dir / "db"), stdout=out)
        files = sorted(p.name for p in (self.dir / "db").glob("*.csv"))
        self.assertEqual(files, sorted(f"{name}.csv" for name in (*PALETTE, "PDMS")))
        self.assertIn("Exported 5 materials", out.getvalue())
        self.assertIn('Effective config: {"out": ', out.getvalue())

    def test_photonic(self):
        output = self.dir / "window.json"
        out = StringIO()
        call_command(
            "photonic",
            layers=2,
            replicas=2,
            max_iters=60,
            plateau_window=20,
            spectrum=str(self.spectrum),
            output=str(output),
            stdout=out,
        )
        result = json.loads(output.read_text())
        self.assertEqual(result["config"]["mode"], "decode")
        self.assertEqual(result["problem"]["n"], 4)

        fom = WindowFom(
            MaterialDb.builtin(),
            Spectrum.from_csv(self.spectrum),
            grid(*FOM_GRID_NM),
        )
        optimum = min(fom(bits) for bits in product((0, 1), repeat=4))
        self.assertGreaterEqual(result["best_cost"], optimum - 1e-12)
        self.assertAlmostEqual(result["best_cost"], fom(result["best_assignment"]))

        stack = json.loads((self.dir / "window_stack.json").read_text())
        self.assertEqual(len(stack["materials"]), 2)
        with open(self.dir / "window_transmission.csv", newline="") as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0], TRANSMISSION_HEADER)
        self.assertEqual(len(rows) - 1, len(grid(*FOM_GRID_NM)))

        for path in result["trace_files"]:
            best = Trace.read_csv(path).best_costs
            self.assertTrue(all(b <= a for a, b in zip(best, best[1:])))
        self.assertIn("Best stack: ", out.getvalue())

    def test_solve_photonic_with_cap(self):
        output = self.dir / "capped.json"
        call_command(
            "solve",
            photonic=1,
            replicas=1,
            max_iters=20,
            cap_thickness=40000.0,
            spectrum=str(self.spectrum),
            output=str(output),
            stdout=StringIO(),
        )
        result = json.loads(output.read_text())
        self.assertEqual(result["problem"]["cap"], ["PDMS", 40000.0])
        self.assertEqual(result["problem"]["family"], "photonic")

    def test_bad_layers_exit_2(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("photonic", layers=0, stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)
