import json
import math
import tempfile
from io import StringIO
from itertools import combinations, permutations
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from variational.exceptions import OracleCapError

from .enums import ProblemFamily
from .generators import MaxCutGraph, gen_higher_order, gen_maxcut, gen_qubo
from .oracle import brute_force_poly, brute_force_tsp, dense_min_eigenvalue
from .pauli import PauliSum, parse_pauli_file, random_pauli_sum
from .polynomial import Polynomial, interaction_count
from .tsp import (
    TspInstance,
    decode_tsp,
    encode_tsp,
    gen_tsp,
    is_one_hot,
    route_length,
    variable_index,
)
from .utils.files import bundle_from_dict, load_reference, write_json

TRIANGLE = ((0.0, 0.0), (3.0, 0.0), (0.0, 4.0))


def one_hot(route):
    nc = len(route)
    x = np.zeros(nc * nc, dtype=int)
    for position, city in enumerate(route):
        x[variable_index(city, position, nc)] = 1
    return x


class PolynomialTests(SimpleTestCase):
    def test_interaction_count_matches_subset_enumeration(self):
        for n in range(1, 13):
            for k in range(1, min(n, 4) + 1):
                direct = sum(
                    1 for r in range(1, k + 1) for _ in combinations(range(n), r)
                )
                self.assertEqual(interaction_count(n, k), direct)
        self.assertEqual(interaction_count(10, 2), 55)
        self.assertEqual(interaction_count(10, 3), 175)

    def test_evaluate_and_expectation(self):
        poly = Polynomial(3, {(0,): 1.0, (1,): -2.0, (0, 1): 3.0}, offset=0.5)
        self.assertEqual(poly.evaluate([1, 1, 0]), 2.5)
        self.assertEqual(poly.evaluate([0, 1, 1]), -1.5)
        self.assertAlmostEqual(poly.expectation([0.5, 0.5, 0.5]), 0.75)
        np.testing.assert_allclose(
            poly.evaluate_many([[0, 0, 0], [1, 0, 0]]), [0.5, 1.5]
        )

    def test_duplicate_keys_are_summed(self):
        poly = Polynomial(2, {(0, 1): 1.0, (0,): 2.0})
        self.assertEqual(poly.term_count, 2)
        self.assertEqual(poly.max_order, 2)

    def test_rejects_bad_terms(self):
        with self.assertRaises(ValidationError):
            Polynomial(2, {(1, 0): 1.0})
        with self.assertRaises(ValidationError):
            Polynomial(2, {(0, 2): 1.0})
        with self.assertRaises(ValidationError):
            Polynomial(3, {(0, 1, 2): 1.0}, max_order=2)
        with self.assertRaises(ValidationError):
            Polynomial(2, {(0,): 1.0}).evaluate([0, 1, 1])

    def test_non_numeric_coefficient_is_an_input_error(self):
        with self.assertRaises(ValidationError) as ctx:
            Polynomial(2, {(0,): "abc"})
        self.assertEqual(ctx.exception.code, "malformed_polynomial")
        with self.assertRaises(ValidationError) as ctx:
            Polynomial.from_dict({"n": "two", "terms": []})
        self.assertEqual(ctx.exception.code, "malformed_problem")

    def test_json_round_trip_keeps_family(self):
        bundle = bundle_from_dict(
            {"n": 2, "N": 3, "k": 2, "terms": [{"vars": [0, 1], "coeff": 1.5}]}
        )
        self.assertEqual(bundle.family, ProblemFamily.NARY)
        self.assertEqual(bundle.polynomial.arity, 3)


class GeneratorTests(SimpleTestCase):
    def test_qubo_term_counts(self):
        self.assertEqual(gen_qubo(10, seed=1).term_count, 55)
        self.assertEqual(gen_qubo(1, seed=1).term_count, 1)

    def test_qubo_is_deterministic(self):
        self.assertEqual(gen_qubo(4, seed=7), gen_qubo(4, seed=7))
        self.assertNotEqual(gen_qubo(4, seed=7), gen_qubo(4, seed=8))

    def test_qubo_coefficients_in_range(self):
        coeffs = np.array(list(gen_qubo(12, seed=3).terms.values()))
        self.assertTrue(np.all(np.abs(coeffs) <= 1.0))

    def test_higher_order_term_counts(self):
        self.assertEqual(gen_higher_order(10, 3, 2, seed=1).term_count, 175)
        self.assertEqual(gen_higher_order(10, 2, 2, seed=1).term_count, 55)
        self.assertEqual(gen_higher_order(3, 3, 2, seed=1).term_count, 7)
        for k in (3, 4, 5):
            poly = gen_higher_order(12, k, 3, seed=2)
            self.assertEqual(poly.term_count, interaction_count(12, k))
            self.assertEqual(poly.arity, 3)

    def test_higher_order_rejects_bad_order(self):
        with self.assertRaises(ValidationError):
            gen_higher_order(3, 4, 2, seed=0)

    def test_maxcut_edge_count(self):
        graph, poly = gen_maxcut(10, seed=1)
        self.assertEqual(len(graph.edges), 11)
        self.assertEqual(len(set(graph.edges)), 11)
        self.assertTrue(all(i < j for i, j in graph.edges))
        self.assertEqual(len(gen_maxcut(20, seed=1)[0].edges), 47)
        self.assertEqual(poly.n, 10)

    def test_maxcut_value_is_minus_cut_size(self):
        poly = MaxCutGraph(n=2, edges=((0, 1),)).to_polynomial()
        self.assertEqual(poly.evaluate([0, 1]), -1.0)
        self.assertEqual(poly.evaluate([0, 0]), 0.0)
        self.assertEqual(poly.evaluate([1, 1]), 0.0)

        graph, poly = gen_maxcut(8, seed=4)
        rng = np.random.default_rng(0)
        for x in rng.integers(0, 2, size=(20, 8)):
            self.assertEqual(graph.cut_size(x), -poly.evaluate(x))


class TspTests(SimpleTestCase):
    def test_valid_tours_cost_their_length(self):
        instance = TspInstance(TRIANGLE)
        poly = encode_tsp(instance)
        self.assertEqual(poly.n, 9)
        for route in permutations(range(3)):
            self.assertAlmostEqual(poly.evaluate(one_hot(route)), 12.0, places=9)
            self.assertAlmostEqual(route_length(route, TRIANGLE), 12.0, places=12)

    def test_all_zero_assignment_pays_every_constraint(self):
        instance = TspInstance(TRIANGLE, penalty=100.0)
        self.assertAlmostEqual(encode_tsp(instance).evaluate(np.zeros(9)), 600.0)

    def test_decode(self):
        self.assertEqual(decode_tsp(one_hot((2, 0, 1)), 3), (2, 0, 1))
        self.assertEqual(decode_tsp(np.zeros(9, dtype=int), 3), (0, 1, 2))
        self.assertEqual(decode_tsp(one_hot((2, 2, 0)), 3), (2, 1, 0))
        self.assertTrue(is_one_hot(one_hot((1, 2, 0)), 3))
        self.assertFalse(is_one_hot(np.ones(9, dtype=int), 3))

    def test_decode_always_returns_a_permutation(self):
        rng = np.random.default_rng(5)
        for x in rng.integers(0, 2, size=(50, 16)):
            self.assertEqual(sorted(decode_tsp(x, 4)), [0, 1, 2, 3])

    def test_generated_cities_stay_in_bounds(self):
        instance = gen_tsp(8, seed=3)
        points = np.asarray(instance.cities)
        self.assertEqual(points.shape, (8, 2))
        self.assertTrue(np.all((points >= 0) & (points <= 10)))

    def test_needs_three_cities(self):
        with self.assertRaises(ValidationError):
            TspInstance(((0, 0), (1, 1)))


class PauliTests(SimpleTestCase):
    def test_parse(self):
        h = parse_pauli_file("1.0 Z")
        self.assertEqual((h.n, h.terms), (1, ((1.0, "Z"),)))
        h = parse_pauli_file("-0.5 ZZ\n0.25 XI\n# comment\n")
        self.assertEqual(h.n, 2)
        self.assertEqual(len(h.terms), 2)

    def test_inconsistent_lengths_report_the_line(self):
        with self.assertRaises(ValidationError) as ctx:
            parse_pauli_file("1.0 Z\n1.0 ZZ")
        self.assertIn("Line 2", ctx.exception.messages[0])

    def test_rejects_complex_and_garbage(self):
        with self.assertRaises(ValidationError):
            parse_pauli_file("1+2j Z")
        with self.assertRaises(ValidationError):
            parse_pauli_file("abc Z")
        with self.assertRaises(ValidationError):
            parse_pauli_file("1.0 Q")
        with self.assertRaises(ValidationError):
            parse_pauli_file("# nothing\n")

    def test_random_diagonal_sum_has_only_i_and_z(self):
        h = random_pauli_sum(6, 10, seed=1, diagonal=True)
        self.assertTrue(h.is_diagonal)
        self.assertEqual(len(h.terms), 10)
        self.assertEqual(parse_pauli_file(h.to_text()), h)


class OracleTests(SimpleTestCase):
    def test_single_variable_minimum(self):
        result = brute_force_poly(Polynomial(1, {(0,): -1.0}))
        self.assertEqual((result.optimum, result.optimizer), (-1.0, (1,)))
        result = brute_force_poly(Polynomial(1, {(0,): -1.0}, arity=3))
        self.assertEqual((result.optimum, result.optimizer), (-2.0, (2,)))

    def test_small_qubo_against_enumeration(self):
        poly = Polynomial(3, {(0,): 1.0, (1,): -2.0, (0, 1): 3.0})
        result = brute_force_poly(poly)
        self.assertEqual(result.optimum, -2.0)
        self.assertEqual(result.optimizer, (0, 1, 0))
        self.assertEqual(result.enumerated, 8)

    def test_gray_walk_matches_direct_scan(self):
        for poly in (gen_qubo(10, seed=2), gen_higher_order(9, 3, 2, seed=4)):
            grid = (np.arange(2**poly.n)[:, None] >> np.arange(poly.n)[::-1]) & 1
            values = poly.evaluate_many(grid)
            result = brute_force_poly(poly)
            self.assertAlmostEqual(result.optimum, values.min(), places=9)

    def test_nary_matches_direct_scan(self):
        poly = gen_higher_order(5, 2, 3, seed=6)
        best = min(
            poly.evaluate(x) for x in np.ndindex(*(3,) * 5)
        )
        self.assertAlmostEqual(brute_force_poly(poly).optimum, best, places=9)

    def test_worker_count_does_not_change_result(self):
        poly = gen_qubo(12, seed=5)
        one = brute_force_poly(poly, workers=1)
        four = brute_force_poly(poly, workers=4)
        self.assertEqual(one.optimum, four.optimum)
        self.assertEqual(one.optimizer, four.optimizer)
        self.assertEqual(one.enumerated, 4096)
        self.assertEqual(four.total_core_time_s, four.wall_time_s * 4)

    def test_cap(self):
        with self.assertRaises(OracleCapError) as ctx:
            brute_force_poly(gen_qubo(12, seed=0), cap=1000)
        self.assertEqual(ctx.exception.work, 4096)

    def test_tsp(self):
        self.assertAlmostEqual(brute_force_tsp(TspInstance(TRIANGLE)).optimum, 12.0)
        square = TspInstance(((0, 0), (1, 0), (1, 1), (0, 1)))
        self.assertAlmostEqual(brute_force_tsp(square).optimum, 4.0)

    def test_tsp_against_full_permutation_scan(self):
        instance = gen_tsp(6, seed=3)
        best = min(
            route_length(route, instance.cities)
            for route in permutations(range(6))
        )
        result = brute_force_tsp(instance)
        self.assertAlmostEqual(result.optimum, best, places=9)
        self.assertEqual(result.enumerated, 60)

    def test_tsp_cap(self):
        with self.assertRaises(OracleCapError):
            brute_force_tsp(gen_tsp(6, seed=1), cap=5)

    def test_dense_min_eigenvalue(self):
        self.assertAlmostEqual(dense_min_eigenvalue(parse_pauli_file("1.0 Z")), -1.0)
        self.assertAlmostEqual(
            dense_min_eigenvalue(parse_pauli_file("1.0 XX")), -1.0, places=10
        )
        h = PauliSum(1, ((0.5, "Z"), (0.5, "X")))
        self.assertAlmostEqual(
            dense_min_eigenvalue(h), -math.sqrt(2) / 2, places=10
        )

    def test_eigen_cap(self):
        with self.assertRaises(OracleCapError):
            dense_min_eigenvalue(random_pauli_sum(4, 3, seed=0), cap=3)


class CommandTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_gen_qubo(self):
        path = self.dir / "q.json"
        out = StringIO()
        call_command("gen", "qubo", n=10, seed=1, output=str(path), stdout=out)
        data = json.loads(path.read_text())
        self.assertEqual(len(data["terms"]), 55)
        self.assertEqual(data["family"], "qubo")
        self.assertIn("T(n,k)=55", out.getvalue())
        self.assertIn("Effective config", out.getvalue())

    def test_gen_hobo_and_maxcut(self):
        path = self.dir / "h.json"
        call_command(
            "gen", "hobo", n=10, k=3, seed=1, output=str(path), stdout=StringIO()
        )
        self.assertEqual(len(json.loads(path.read_text())["terms"]), 175)

        path = self.dir / "m.json"
        out = StringIO()
        call_command("gen", "maxcut", n=10, seed=1, output=str(path), stdout=out)
        self.assertEqual(len(json.loads(path.read_text())["edges"]), 11)
        self.assertIn("edges=11", out.getvalue())

    def test_gen_usage_errors_exit_2(self):
        with self.assertRaises(CommandError) as ctx:
            call_command(
                "gen", "tsp", seed=1, output=str(self.dir / "t.json"), stdout=StringIO()
            )
        self.assertEqual(ctx.exception.returncode, 2)
        with self.assertRaises(CommandError) as ctx:
            call_command(
                "gen", "hobo", n=3, k=5, output=str(self.dir / "x.json"),
                stdout=StringIO(),
            )
        self.assertEqual(ctx.exception.returncode, 2)

    def test_brute_problem(self):
        problem = self.dir / "q.json"
        write_json(problem, {"family": "qubo", **gen_qubo(12, seed=5).to_dict()})
        output = self.dir / "oracle.json"
        out = StringIO()
        call_command(
            "brute", problem=str(problem), workers=1, output=str(output), stdout=out
        )
        self.assertIn("enumerated=4096", out.getvalue())
        data = json.loads(output.read_text())
        self.assertEqual(data["enumerated"], 4096)
        self.assertEqual(load_reference(output), data["optimum"])

    def test_brute_hamiltonian(self):
        source = self.dir / "h.txt"
        source.write_text("1.0 Z\n")
        output = self.dir / "eig.json"
        call_command(
            "brute", hamiltonian=str(source), output=str(output), stdout=StringIO()
        )
        self.assertEqual(json.loads(output.read_text())["optimum"], -1.0)

    def test_brute_tsp_route(self):
        source = self.dir / "t.json"
        write_json(source, TspInstance(TRIANGLE).to_dict())
        output = self.dir / "tour.json"
        call_command("brute", tsp=str(source), output=str(output), stdout=StringIO())
        data = json.loads(output.read_text())
        self.assertAlmostEqual(data["optimum"], 12.0)
        self.assertEqual(sorted(data["route"]), [0, 1, 2])

    def test_non_numeric_coefficient_exits_2(self):
        problem = self.dir / "bad.json"
        write_json(
            problem,
            {"family": "qubo", "n": 2, "terms": [{"vars": [0], "coeff": "abc"}]},
        )
        with self.assertRaises(CommandError) as ctx:
            call_command("brute", problem=str(problem), stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_brute_missing_file_exits_2(self):
        with self.assertRaises(CommandError) as ctx:
            call_command(
                "brute", problem=str(self.dir / "missing.json"), stdout=StringIO()
            )
        self.assertEqual(ctx.exception.returncode, 2)
