import io
import json
import math
import os
import tempfile
import unittest
from functools import reduce
from io import StringIO
from pathlib import Path

import numpy as np
from django.contrib import admin
from django.core.exceptions import ValidationError
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase
from openpyxl import load_workbook

from problems.enums import ProblemFamily, ReferenceSource
from problems.generators import gen_higher_order, gen_maxcut, gen_qubo
from problems.oracle import (
    brute_force_poly,
    brute_force_tsp,
    dense_min_eigenvalue,
    pauli_matrix,
)
from problems.pauli import parse_pauli_file, random_pauli_sum
from problems.polynomial import Polynomial
from problems.rng import make_rng
from problems.tsp import TspInstance, encode_tsp, gen_tsp
from problems.utils.files import write_json

from .admin import RunRecordAdmin
from .ansatz import (
    AnsatzConfig,
    LabelSet,
    decode_binary,
    decode_nary,
    default_hyperparameters,
    fidelities,
    label_probabilities,
    probability_one,
    qubit_state,
    qubit_states,
)
from .bench import bench, doubling_ratio, fit_rows, parse_sizes
from .enums import EvalKind, GateSet, OptimizerMethod, StopReason
from .evaluator import (
    BlackBoxCost,
    EvalMode,
    PartitionPlan,
    PauliCost,
    PolynomialCost,
    TspCost,
    blackbox_cost,
    grouped_state,
    joint_probabilities,
    pauli_expectation,
    poly_cost,
    sample_assignments,
    variable_means,
)
from .exceptions import BlackBoxError, MemoryGuardError, ObjectiveError, RunError
from .models import RunRecord
from .optimizer import StopPolicy, Trace, minimize, relative_change
from .runner import RunConfig, approximation_ratio, run

ACCEPTANCE = os.getenv("DVQOA_ACCEPTANCE") == "1"
QUICK = StopPolicy(max_iters=300, plateau_window=60)


def hamming_weight(bits):
    return float(np.sum(bits))


def always_fails(bits):
    raise RuntimeError("detector offline")


def ry(angle):
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rx(angle):
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def random_product_state(n, rng):
    amps = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    return amps / np.linalg.norm(amps, axis=1, keepdims=True)


def dense_expectation(hamiltonian, states):
    psi = reduce(np.kron, states)
    return float(np.real(np.conj(psi) @ (pauli_matrix(hamiltonian) @ psi)))


class AnsatzTests(SimpleTestCase):
    def test_dimension(self):
        self.assertEqual(AnsatzConfig(4, m=3).dimension, 12)
        self.assertEqual(AnsatzConfig(4, m=3, gate_set=GateSet.RXRY).dimension, 24)

    def test_invalid_config(self):
        for kwargs in ({"n": 0}, {"n": 2, "m": 0}, {"n": 2, "arity": 1}):
            with self.assertRaises(ValidationError):
                AnsatzConfig(**kwargs)
        with self.assertRaises(ValidationError):
            AnsatzConfig(2, gate_set="RZ")
        with self.assertRaises(ValidationError):
            qubit_states(AnsatzConfig(2, m=1), [0.0])

    def test_ry_examples(self):
        state = qubit_state(AnsatzConfig(1, m=1, t=1), [0.0], 0)
        self.assertEqual((state.amp0, state.amp1), (1, 0))
        self.assertEqual(probability_one(state), 0.0)

        state = qubit_state(AnsatzConfig(1, m=3, t=3), [math.pi / 9] * 3, 0)
        self.assertAlmostEqual(abs(state.amp0), 0.0, places=12)
        self.assertAlmostEqual(state.amp1.real, 1.0, places=12)

        state = qubit_state(AnsatzConfig(1, m=1, t=1), [math.pi / 2], 0)
        self.assertAlmostEqual(probability_one(state), 0.5, places=12)

    def test_rx_state(self):
        state = qubit_state(AnsatzConfig(1, m=1, t=1, gate_set=GateSet.RX), [1.0], 0)
        self.assertAlmostEqual(state.amp0, math.cos(0.5), places=12)
        self.assertAlmostEqual(state.amp1, -1j * math.sin(0.5), places=12)

    def test_rxry_matches_dense_products(self):
        config = AnsatzConfig(1, m=1, t=2, gate_set=GateSet.RXRY)
        layer = rx(math.pi / 2) @ ry(math.pi / 2)
        expected = layer @ layer @ np.array([1, 0], dtype=complex)
        np.testing.assert_allclose(
            qubit_states(config, [math.pi / 2, math.pi / 2])[0], expected, atol=1e-12
        )

        config = AnsatzConfig(2, m=2, t=3, gate_set=GateSet.RXRY)
        theta = np.arange(8) * 0.37
        angles = theta.reshape(2, 2, 2)
        states = qubit_states(config, theta)
        for q in range(2):
            unitary = np.eye(2, dtype=complex)
            for _ in range(3):
                for layer in range(2):
                    gate = rx(angles[q, layer, 0]) @ ry(angles[q, layer, 1])
                    unitary = gate @ unitary
            np.testing.assert_allclose(states[q], unitary[:, 0], atol=1e-12)

    def test_states_are_normalised(self):
        rng = make_rng(1, "test")
        for gate_set in GateSet.values:
            config = AnsatzConfig(5, m=3, t=2, gate_set=gate_set)
            states = qubit_states(config, config.random_parameters(rng))
            np.testing.assert_allclose(
                np.sum(np.abs(states) ** 2, axis=1), 1.0, atol=1e-12
            )
        config = AnsatzConfig(5)
        states = qubit_states(config, config.random_parameters(rng))
        self.assertTrue(np.all(np.abs(states.imag) < 1e-12))

    def test_ry_additivity_and_periodicity(self):
        theta = np.array([0.3, -1.2, 2.0])
        base = qubit_states(AnsatzConfig(1, m=3, t=2), theta)
        shuffled = qubit_states(AnsatzConfig(1, m=3, t=2), theta[::-1])
        collapsed = qubit_states(AnsatzConfig(1, m=1, t=1), [2 * theta.sum()])
        np.testing.assert_allclose(base, shuffled, atol=1e-12)
        np.testing.assert_allclose(base, collapsed, atol=1e-12)

        config = AnsatzConfig(1, m=1, t=1)
        state = qubit_states(config, [0.8])
        np.testing.assert_allclose(
            qubit_states(config, [0.8 + 4 * math.pi]), state, atol=1e-12
        )
        flipped = qubit_states(config, [0.8 + 2 * math.pi])
        np.testing.assert_allclose(flipped, -state, atol=1e-12)
        self.assertAlmostEqual(
            float(probability_one(flipped)), float(probability_one(state)), places=12
        )
        self.assertEqual(
            decode_nary(flipped, LabelSet(3)), decode_nary(state, LabelSet(3))
        )

    def test_decode_binary(self):
        self.assertEqual(decode_binary(0.9), 1)
        self.assertEqual(decode_binary(0.1), 0)
        self.assertEqual(decode_binary(0.5), 0)
        self.assertEqual(probability_one(np.array([0, 1])), 1.0)

    def test_label_set(self):
        labels = LabelSet(3)
        np.testing.assert_allclose(np.linalg.norm(labels.labels, axis=1), 1.0)
        reference = np.array(
            [
                [1.0, 0.0],
                [-math.cos(math.pi / 3), -math.sin(math.pi / 3)],
                [-math.cos(math.pi / 3), math.sin(math.pi / 3)],
            ]
        )
        overlaps = np.abs(reference @ labels.labels.T)
        np.testing.assert_allclose(np.sort(overlaps.max(axis=1)), [1, 1, 1])

    def test_decode_nary(self):
        labels = LabelSet(3)
        self.assertEqual(decode_nary(np.array([1.0, 0.0]), labels), 0)
        state = np.array([-math.cos(math.pi / 3), -math.sin(math.pi / 3)])
        f = fidelities(state, labels)
        winners = np.flatnonzero(np.isclose(f, 1.0, atol=1e-12))
        self.assertEqual(len(winners), 1)
        self.assertEqual(decode_nary(state, labels), winners[0])
        self.assertEqual(decode_nary(np.array([0.0, 1.0]), LabelSet(2)), 1)
        for arity in (2, 3, 4, 5, 7):
            labels = LabelSet(arity)
            for j, label in enumerate(labels.labels):
                self.assertEqual(decode_nary(label, labels), j)
                self.assertEqual(decode_nary(1j * label, labels), j)

    def test_binary_labels_agree_with_threshold(self):
        rng = make_rng(2, "test")
        config = AnsatzConfig(50, m=1, t=1)
        states = qubit_states(config, config.random_parameters(rng))
        np.testing.assert_array_equal(
            decode_nary(states, LabelSet(2)), decode_binary(probability_one(states))
        )

    def test_label_probabilities(self):
        labels = LabelSet(2)
        state = np.array([math.cos(0.4), math.sin(0.4)])
        np.testing.assert_allclose(
            label_probabilities(state, labels), np.abs(state) ** 2, atol=1e-12
        )
        labels = LabelSet(3)
        for alpha in np.linspace(-3, 3, 25):
            state = np.array([math.cos(alpha), math.sin(alpha)])
            self.assertAlmostEqual(fidelities(state, labels).sum(), 1.5, places=12)
            p = label_probabilities(state, labels)
            self.assertAlmostEqual(p.sum(), 1.0, places=12)
            self.assertEqual(int(np.argmax(p)), decode_nary(state, labels))

    def test_default_hyperparameters(self):
        self.assertEqual(default_hyperparameters(12), (3, 3))
        self.assertEqual(default_hyperparameters(40), (7, 7))
        self.assertEqual(default_hyperparameters(12, arity=5), (7, 7))
        self.assertEqual(
            default_hyperparameters(25, family=ProblemFamily.TSP, cities=5), (3, 3)
        )
        self.assertEqual(
            default_hyperparameters(49, family=ProblemFamily.TSP, cities=7), (7, 7)
        )


class EvaluatorTests(SimpleTestCase):
    def test_expectation_and_decode_examples(self):
        config = AnsatzConfig(1, m=1, t=1)
        one = Polynomial(1, {(0,): 1.0})
        value = poly_cost(one, config, [math.pi / 2], EvalMode.expectation()).value
        self.assertAlmostEqual(value, 0.5, places=12)

        config = AnsatzConfig(2, m=1, t=1)
        both = Polynomial(2, {(0, 1): 1.0})
        theta = [math.pi / 2 - 1e-9] * 2
        self.assertAlmostEqual(
            poly_cost(both, config, theta, EvalMode.expectation()).value,
            0.25,
            places=8,
        )
        decoded = poly_cost(both, config, theta, EvalMode.decode())
        self.assertEqual((decoded.value, decoded.assignment), (0.0, (0, 0)))

    def test_mode_validation(self):
        with self.assertRaises(ValidationError):
            EvalMode(EvalKind.SHOTS)
        with self.assertRaises(ValidationError):
            EvalMode("annealed")
        self.assertEqual(str(EvalMode.sampled(64)), "shots(64)")
        config = AnsatzConfig(2)
        with self.assertRaises(ValidationError):
            poly_cost(gen_qubo(2, 0), config, np.zeros(6), EvalMode.sampled(8))
        with self.assertRaises(ValidationError):
            poly_cost(gen_qubo(3, 0), config, np.zeros(6))

    def test_pauli_expectation_examples(self):
        up = np.array([[1.0, 0.0]])
        self.assertEqual(pauli_expectation(parse_pauli_file("1.0 Z"), up), 1.0)
        half = qubit_states(AnsatzConfig(1, m=1, t=1), [math.pi / 2])
        self.assertAlmostEqual(
            pauli_expectation(parse_pauli_file("1.0 X"), half), 1.0, places=12
        )
        rng = make_rng(3, "test")
        config = AnsatzConfig(1)
        real = qubit_states(config, config.random_parameters(rng))
        self.assertAlmostEqual(
            pauli_expectation(parse_pauli_file("1.0 Y"), real), 0.0, places=12
        )

    def test_pauli_factorisation_matches_dense(self):
        rng = make_rng(4, "test")
        for case in range(100):
            n = int(rng.integers(1, 9))
            hamiltonian = random_pauli_sum(n, 6, seed=case)
            states = random_product_state(n, rng)
            factorised = pauli_expectation(hamiltonian, states)
            self.assertLess(
                abs(factorised - dense_expectation(hamiltonian, states)), 1e-10
            )
            self.assertGreaterEqual(
                factorised, dense_min_eigenvalue(hamiltonian) - 1e-9
            )

    def test_grouped_state(self):
        states = np.array([[1, 0], [0, 1]], dtype=complex)
        (vector,) = grouped_state(states, PartitionPlan.single(2))
        np.testing.assert_array_equal(vector, [0, 1, 0, 0])
        groups = grouped_state(states, PartitionPlan.per_qubit(2))
        np.testing.assert_array_equal(groups[0], states[0])
        np.testing.assert_array_equal(groups[1], states[1])

    def test_memory_guard(self):
        states = np.tile([1.0, 0.0], (4, 1))
        with self.assertRaises(MemoryGuardError):
            grouped_state(states, PartitionPlan.single(4), cap=3)

    def test_partition_plans(self):
        self.assertEqual(PartitionPlan.even(12, 3).sizes, (4, 4, 4))
        self.assertEqual(PartitionPlan.even(10, 3).sizes, (4, 3, 3))
        self.assertEqual(PartitionPlan.capped(25, 10).sizes, (9, 8, 8))
        self.assertEqual(PartitionPlan.parse("3", 12).sizes, (4, 4, 4))
        self.assertEqual(PartitionPlan.parse("6,6", 12).sizes, (6, 6))
        with self.assertRaises(ValidationError):
            PartitionPlan.parse("5,5", 12)
        with self.assertRaises(ValidationError):
            PartitionPlan.parse("x", 12)

    def test_partition_invariance(self):
        config = AnsatzConfig(12)
        theta = config.random_parameters(make_rng(5, "test"))
        states = qubit_states(config, theta)
        poly = gen_qubo(12, seed=5)
        plans = [
            PartitionPlan.single(12),
            PartitionPlan((6, 6)),
            PartitionPlan((4, 4, 4)),
            PartitionPlan.per_qubit(12),
        ]
        reference = joint_probabilities(states, plans[0])
        decoded = poly_cost(poly, config, theta, EvalMode.decode(), plan=plans[0])
        expected = poly_cost(poly, config, theta, EvalMode.expectation()).value
        for plan in plans[1:]:
            np.testing.assert_allclose(
                joint_probabilities(states, plan), reference, atol=1e-12, rtol=0
            )
            again = poly_cost(poly, config, theta, EvalMode.decode(), plan=plan)
            self.assertEqual(again.value, decoded.value)
            self.assertEqual(again.assignment, decoded.assignment)
            value = poly_cost(poly, config, theta, EvalMode.expectation(), plan=plan)
            self.assertAlmostEqual(value.value, expected, places=10)
        np.testing.assert_allclose(
            variable_means(states, 2, plans[2]), probability_one(states), atol=1e-12
        )

    def test_shot_mean_tracks_expectation(self):
        poly = gen_qubo(10, seed=6)
        config = AnsatzConfig(10)
        shots = 100_000
        within = 0
        for rep in range(20):
            theta = config.random_parameters(make_rng(rep, "theta"))
            states = qubit_states(config, theta)
            expected = poly.expectation(variable_means(states, 2))
            samples = sample_assignments(states, 2, shots, make_rng(rep, "shots"))
            values = poly.evaluate_many(samples)
            bound = 3 * values.std() / math.sqrt(shots)
            within += abs(values.mean() - expected) <= bound
        self.assertGreaterEqual(within, 18)

    def test_nary_sampling_follows_marginals(self):
        config = AnsatzConfig(3, arity=3)
        states = qubit_states(config, config.random_parameters(make_rng(7, "test")))
        samples = sample_assignments(states, 3, 50_000, make_rng(7, "shots"))
        self.assertTrue(set(np.unique(samples)) <= {0, 1, 2})
        np.testing.assert_allclose(
            samples.mean(axis=0), variable_means(states, 3), atol=0.03
        )

    def test_blackbox(self):
        config = AnsatzConfig(4, m=1, t=1)
        result = blackbox_cost(hamming_weight, config, np.zeros(4))
        self.assertEqual((result.value, result.assignment), (0.0, (0, 0, 0, 0)))
        with self.assertRaises(BlackBoxError) as ctx:
            blackbox_cost(always_fails, config, np.zeros(4))
        self.assertEqual(ctx.exception.assignment, (0, 0, 0, 0))

    def test_cost_mode_restrictions(self):
        config = AnsatzConfig(2)
        with self.assertRaises(ValidationError):
            BlackBoxCost(hamming_weight, 2).evaluate(
                config, np.zeros(6), EvalMode.expectation()
            )
        with self.assertRaises(ValidationError):
            PauliCost(parse_pauli_file("1.0 ZZ")).evaluate(
                config, np.zeros(6), EvalMode.sampled(4), make_rng(0, "x")
            )

    def test_pauli_decode_mode_scores_the_basis_state(self):
        cost = PauliCost(parse_pauli_file("1.0 ZI\n0.5 XX"))
        config = AnsatzConfig(2, m=1, t=1)
        result = cost.evaluate(config, [math.pi, 0.0], EvalMode.decode())
        self.assertEqual(result.assignment, (1, 0))
        self.assertAlmostEqual(result.value, -1.0, places=12)

    def test_pauli_best_slot_prefers_the_basis_energy(self):
        cost = PauliCost(parse_pauli_file("1.0 Z"))
        config = AnsatzConfig(1, m=1, t=1)
        result = cost.evaluate(config, [math.pi - 0.1], EvalMode.expectation())
        self.assertAlmostEqual(result.value, -math.cos(0.1), places=12)
        value, assignment = result.best
        self.assertEqual(assignment, (1,))
        self.assertEqual(value, -1.0)


class OptimizerTests(SimpleTestCase):
    def test_trace_extend_continues_counts_and_bests(self):
        first, second = Trace(), Trace()
        first.append(3.0, 2.0)
        first.append(1.5, 2.0)
        second.append(4.0, 1.0)
        second.append(0.5, 3.0)
        merged = Trace().extend(first).extend(second)
        self.assertEqual([r.iteration for r in merged.records], [1, 2, 3, 4])
        self.assertEqual(merged.best_costs, [3.0, 1.5, 1.5, 0.5])
        self.assertEqual(
            [r.decoded_cost for r in merged.records], [2.0, 2.0, 1.0, 1.0]
        )

    def test_relative_change(self):
        self.assertAlmostEqual(relative_change(100, 99.96), 4e-4, places=12)
        self.assertEqual(relative_change(0, 0), 0)
        self.assertAlmostEqual(relative_change(-10, -10.1), 0.01, places=12)

    def test_policy_validation(self):
        with self.assertRaises(ValidationError):
            StopPolicy(max_iters=0)
        with self.assertRaises(ValidationError):
            StopPolicy(method="bfgs")

    def test_quadratic_converges(self):
        result = minimize(lambda x: float((x[0] - 2.0) ** 2), np.array([0.0]))
        self.assertLess(abs(result.x[0] - 2.0), 1e-4)
        self.assertEqual(result.stop_reason, StopReason.CONVERGED)

    def test_cobyla(self):
        policy = StopPolicy(method=OptimizerMethod.COBYLA)
        result = minimize(
            lambda x: float((x[0] - 2.0) ** 2 + (x[1] + 1.0) ** 2),
            np.zeros(2),
            policy,
        )
        np.testing.assert_allclose(result.x, [2.0, -1.0], atol=1e-3)

    def test_constant_objective_stops_on_plateau(self):
        policy = StopPolicy(plateau_window=20)
        result = minimize(lambda x: 1.0, np.zeros(4), policy)
        self.assertEqual(result.stop_reason, StopReason.PLATEAU)
        self.assertEqual(result.evaluations, 4 + 1 + 20)

    def test_sphere_from_random_start(self):
        result = minimize(lambda x: float(np.sum(x**2)), 5, seed=3)
        self.assertLess(result.fun, 1e-6)
        self.assertLessEqual(result.evaluations, 5000)

    def test_max_iters_is_never_exceeded(self):
        policy = StopPolicy(max_iters=30)
        result = minimize(lambda x: float(np.sum(x**2)), 5, policy, seed=1)
        self.assertEqual(result.stop_reason, StopReason.MAX_ITERS)
        self.assertEqual(result.evaluations, 30)

    def test_trace_best_is_monotone_and_minimal(self):
        seen = []

        def objective(x):
            value = float(np.sum((x - 1.0) ** 2))
            seen.append(value)
            return value

        result = minimize(objective, 3, StopPolicy(max_iters=200), seed=2)
        best = result.trace.best_costs
        self.assertTrue(all(b <= a for a, b in zip(best, best[1:])))
        self.assertEqual(result.fun, min(seen))

    def test_same_inputs_same_trace(self):
        def sphere(x):
            return float(np.sum(x**2))

        first = minimize(sphere, 4, StopPolicy(max_iters=150), seed=9)
        second = minimize(sphere, 4, StopPolicy(max_iters=150), seed=9)
        self.assertEqual(
            [r.cost for r in first.trace.records],
            [r.cost for r in second.trace.records],
        )

    def test_non_finite_objective(self):
        with self.assertRaises(ObjectiveError) as ctx:
            minimize(lambda x: float("nan"), np.array([0.25, 0.5]))
        np.testing.assert_array_equal(ctx.exception.x, [0.25, 0.5])

    def test_trace_csv(self):
        trace = Trace()
        trace.append(3.0, 2.0)
        trace.append(1.5)
        with tempfile.TemporaryDirectory() as tmp:
            path = trace.write_csv(Path(tmp) / "trace.csv")
            self.assertEqual(
                path.read_text().splitlines()[0], "iter,cost,best_cost,decoded_cost"
            )
            again = Trace.read_csv(path)
            self.assertEqual(again.best_costs, [3.0, 1.5])
            self.assertIsNone(again.records[1].decoded_cost)
            bad = Path(tmp) / "bad.csv"
            bad.write_text("a,b\n1,2\n")
            with self.assertRaises(ValidationError):
                Trace.read_csv(bad)


class RunnerTests(SimpleTestCase):
    def _config(self, poly, **kwargs):
        kwargs.setdefault("replicas", 4)
        kwargs.setdefault("policy", QUICK)
        return RunConfig(
            cost=PolynomialCost(poly), ansatz=AnsatzConfig(poly.n), **kwargs
        )

    def test_approximation_ratio(self):
        self.assertEqual(approximation_ratio(-3, -4, ProblemFamily.QUBO).ratio, 0.75)
        self.assertAlmostEqual(
            approximation_ratio(12.5, 12, ProblemFamily.TSP).ratio, 0.96
        )
        outcome = approximation_ratio(0.5, 0.0, ProblemFamily.QUBO)
        self.assertFalse(outcome.defined)
        self.assertEqual(outcome.gap, 0.5)
        with self.assertRaises(ValidationError):
            approximation_ratio(1.0, None, ProblemFamily.QUBO)

    def test_best_is_minimum_over_replicas(self):
        poly = gen_qubo(8, seed=1)
        result = run(self._config(poly))
        costs = [r.best_cost for r in result.replicas]
        self.assertEqual(result.best_cost, min(costs))
        self.assertEqual(poly.evaluate(result.best_assignment), result.best_cost)
        self.assertGreaterEqual(result.best_cost, brute_force_poly(poly).optimum)
        self.assertEqual(sum(result.stop_reasons.values()), 4)

    def test_worker_count_does_not_change_result(self):
        poly = gen_qubo(8, seed=2)
        one = run(self._config(poly, workers=1, seed=11)).to_dict()
        two = run(self._config(poly, workers=2, seed=11)).to_dict()
        for data in (one, two):
            data.pop("wall_time_s")
        self.assertEqual(json.dumps(one), json.dumps(two))

    def test_config_validation(self):
        poly = gen_qubo(4, seed=0)
        with self.assertRaises(ValidationError):
            self._config(poly, replicas=0)
        with self.assertRaises(ValidationError):
            RunConfig(cost=PolynomialCost(poly), ansatz=AnsatzConfig(5))
        with self.assertRaises(ValidationError):
            self._config(poly, plan=PartitionPlan((3, 3)))

    def test_all_replicas_failing(self):
        config = RunConfig(
            cost=BlackBoxCost(always_fails, 2), ansatz=AnsatzConfig(2), replicas=2
        )
        with self.assertRaises(RunError) as ctx:
            run(config)
        self.assertEqual(len(ctx.exception.errors), 2)

    def test_tsp_reports_route_length(self):
        instance = TspInstance(((0.0, 0.0), (3.0, 0.0), (0.0, 4.0)))
        cost = TspCost(instance, encode_tsp(instance))
        config = RunConfig(
            cost=cost, ansatz=AnsatzConfig(9), replicas=2, policy=QUICK
        )
        result = run(config).with_reference(12.0, ReferenceSource.ORACLE)
        self.assertAlmostEqual(result.found_value, 12.0)
        self.assertAlmostEqual(result.approx_ratio, 1.0)
        self.assertEqual(sorted(result.details["route"]), [0, 1, 2])

    def test_chemistry_single_qubit(self):
        for text in ("1.0 Z", "-1.0 X"):
            config = RunConfig(
                cost=PauliCost(parse_pauli_file(text)),
                ansatz=AnsatzConfig(1),
                replicas=2,
            )
            result = run(config).with_reference(-1.0, ReferenceSource.ORACLE)
            self.assertAlmostEqual(result.best_cost, -1.0, places=6)
            self.assertAlmostEqual(result.approx_ratio, 1.0, places=6)

    def test_nary_runs_finish_with_a_decode_pass(self):
        poly = gen_higher_order(3, 2, 3, seed=1)
        config = RunConfig(
            cost=PolynomialCost(poly, ProblemFamily.NARY),
            ansatz=AnsatzConfig(3, arity=3),
            replicas=4,
            policy=QUICK,
        )
        result = run(config)
        self.assertAlmostEqual(
            result.best_cost, brute_force_poly(poly).optimum, places=9
        )
        evaluations = result.to_dict()["evaluations"]
        self.assertTrue(all(e <= QUICK.max_iters for e in evaluations))
        self.assertIsNone(PolynomialCost(gen_qubo(3, seed=1)).refine_mode)
        self.assertEqual(config.cost.refine_mode.kind, EvalKind.DECODE)

    def test_diagonal_hamiltonian_reports_the_exact_basis_energy(self):
        hamiltonian = parse_pauli_file("1.0 ZI\n-0.5 IZ\n0.3 ZZ")
        config = RunConfig(
            cost=PauliCost(hamiltonian), ansatz=AnsatzConfig(2), replicas=2
        )
        result = run(config)
        self.assertEqual(result.best_assignment, (1, 0))
        self.assertAlmostEqual(result.best_cost, -1.8, places=12)

    def test_trace_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            result = run(self._config(gen_qubo(5, seed=3), trace_dir=tmp))
            self.assertEqual(len(result.trace_files), 4)
            self.assertTrue(all(Path(p).exists() for p in result.trace_files))


class BenchTests(SimpleTestCase):
    def test_parse_sizes(self):
        self.assertEqual(parse_sizes("8,16,32"), [8, 16, 32])
        self.assertEqual(parse_sizes("8..11"), [8, 9, 10, 11])
        with self.assertRaises(ValidationError):
            parse_sizes("eight")

    def test_eval_scaling_rows(self):
        rows = bench("eval_scaling", [8, 16, 32, 64], repeats=1)
        self.assertEqual([r.size for r in rows], [8, 16, 32, 64])
        self.assertEqual({r.mode for r in rows}, {"per_qubit"})
        self.assertTrue(all(r.seconds >= 0 for r in rows))

    def test_brute_vs_dvqoa_pairs(self):
        rows = bench("brute_vs_dvqoa", [6, 7], replicas=2, policy=QUICK)
        self.assertEqual([r.mode for r in rows], ["brute", "dvqoa"] * 2)
        self.assertTrue(
            all(r.approx_ratio <= 1.0 + 1e-9 for r in rows if r.approx_ratio)
        )
        fit_rows(rows)
        self.assertIsNotNone(doubling_ratio(rows))

    def test_unknown_suite(self):
        with self.assertRaises(ValidationError):
            bench("nope", [1])


class CommandTests(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.problem = self.dir / "qubo.json"
        write_json(self.problem, {"family": "qubo", **gen_qubo(6, seed=4).to_dict()})

    def tearDown(self):
        self.tmp.cleanup()

    def _solve(self, name, **options):
        options.setdefault("problem", str(self.problem))
        options.setdefault("replicas", 3)
        options.setdefault("max_iters", 200)
        options.setdefault("plateau_window", 50)
        options = {k: v for k, v in options.items() if v is not None}
        output = self.dir / f"{name}.json"
        out = StringIO()
        call_command("solve", output=str(output), stdout=out, **options)
        return json.loads(output.read_text()), out.getvalue()

    def test_solve_with_oracle_reference(self):
        data, out = self._solve("run", oracle=True)
        self.assertEqual(data["reference_source"], "oracle")
        self.assertIsNotNone(data["approx_ratio"])
        self.assertEqual(len(data["trace_files"]), 3)
        self.assertEqual(data["config"]["n"], 6)
        self.assertEqual(data["config"]["mode"], "expectation")
        self.assertIn("Effective config", out)
        self.assertIn("approx_ratio=", out)

    def test_solve_external_reference(self):
        reference = self.dir / "ref.json"
        write_json(reference, {"reference": -2.0})
        data, _ = self._solve("ext", reference=str(reference))
        self.assertEqual(data["reference_source"], "external")
        self.assertEqual(data["reference"], -2.0)

    def test_partitions_do_not_change_decode_results(self):
        one, _ = self._solve("p1", mode="decode", partitions="1")
        three, _ = self._solve("p3", mode="decode", partitions="3")
        self.assertEqual(one["best_cost"], three["best_cost"])
        self.assertEqual(one["best_assignment"], three["best_assignment"])
        self.assertEqual(three["config"]["partitions"], [2, 2, 2])

    def test_shots_mode(self):
        data, _ = self._solve("shots", mode="shots", shots=256)
        self.assertEqual(data["config"]["mode"], "shots(256)")

    def test_worker_count_does_not_change_result_file(self):
        one, _ = self._solve("w1", workers=1)
        two, _ = self._solve("w2", workers=2)
        for data in (one, two):
            data.pop("wall_time_s")
            data.pop("trace_files")
        self.assertEqual(one, two)

    def test_blackbox_cost_plugin(self):
        data, _ = self._solve(
            "plugin", problem=None, cost="variational.tests:hamming_weight", n=4
        )
        self.assertEqual(data["problem"]["family"], "blackbox")
        self.assertEqual(data["config"]["mode"], "decode")
        self.assertEqual(data["best_cost"], sum(data["best_assignment"]))

    def test_usage_errors_exit_2(self):
        for options in (
            {"problem": None, "cost": "variational.tests:hamming_weight"},
            {"problem": None, "cost": "variational.tests:missing", "n": 2},
            {"partitions": "5,5"},
            {"replicas": 0},
            {"problem": str(self.dir / "missing.json")},
        ):
            with self.assertRaises(CommandError) as ctx:
                self._solve("bad", **options)
            self.assertEqual(ctx.exception.returncode, 2)

    def test_run_failure_exits_1(self):
        with self.assertRaises(CommandError) as ctx:
            self._solve(
                "fail", problem=None, cost="variational.tests:always_fails", n=2
            )
        self.assertEqual(ctx.exception.returncode, 1)

    def test_chem(self):
        source = self.dir / "h.txt"
        source.write_text("1.0 Z\n")
        output = self.dir / "chem.json"
        out = StringIO()
        call_command(
            "chem", hamiltonian=str(source), replicas=2, output=str(output), stdout=out
        )
        data = json.loads(output.read_text())
        self.assertAlmostEqual(data["best_cost"], -1.0, places=6)
        self.assertEqual(data["reference"], -1.0)
        self.assertAlmostEqual(data["approx_ratio"], 1.0, places=6)
        self.assertIn("energy=", out.getvalue())

    def test_bench(self):
        output = self.dir / "bench.csv"
        call_command(
            "bench", "eval_scaling", sizes="8,16", repeats=1, output=str(output),
            stdout=StringIO(),
        )
        lines = output.read_text().splitlines()
        self.assertEqual(lines[0].split(",")[:2], ["suite", "size"])
        self.assertEqual(len(lines), 3)

    def test_bench_bad_sizes_exit_2(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("bench", "eval_scaling", sizes="x", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_report(self):
        data, _ = self._solve("rep")
        merged = self.dir / "merged.csv"
        book = self.dir / "book.xlsx"
        out = StringIO()
        call_command(
            "report",
            source=str(self.dir / "rep.json"),
            output=str(merged),
            xlsx=str(book),
            stdout=out,
        )
        self.assertIn("Effective config", out.getvalue())
        for path in data["trace_files"]:
            self.assertIn(path, out.getvalue())
        header = merged.read_text().splitlines()[0]
        self.assertEqual(header, "replica,iter,cost,best_cost,decoded_cost")
        wb = load_workbook(book)
        self.assertEqual(
            wb.sheetnames,
            ["Summary", "replica_0000", "replica_0001", "replica_0002"],
        )
        self.assertEqual(wb["Summary"]["A1"].value, "Field")

    def test_report_rejects_non_result(self):
        other = self.dir / "other.json"
        write_json(other, {"hello": 1})
        with self.assertRaises(CommandError) as ctx:
            call_command("report", source=str(other), stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)


class RunRecordTests(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_save_flag_stores_the_run(self):
        problem = self.dir / "q.json"
        write_json(problem, {"family": "qubo", **gen_qubo(5, seed=1).to_dict()})
        out = StringIO()
        call_command(
            "solve",
            problem=str(problem),
            replicas=2,
            max_iters=100,
            oracle=True,
            save=True,
            output=str(self.dir / "r.json"),
            stdout=out,
        )
        record = RunRecord.objects.get()
        self.assertEqual(record.command, "solve")
        self.assertEqual(record.family, ProblemFamily.QUBO)
        self.assertEqual((record.n, record.m, record.t), (5, 3, 3))
        self.assertEqual(record.reference_source, ReferenceSource.ORACLE)
        self.assertEqual(len(record.trace_files), 2)
        self.assertIn(f"Saved run #{record.pk}", out.getvalue())

    def test_ratio_needs_reference(self):
        record = RunRecord(
            command="solve",
            family=ProblemFamily.QUBO,
            n=2,
            m=1,
            t=1,
            mode="expectation",
            replicas=1,
            seed=0,
            best_cost=-1.0,
            found_value=-1.0,
            approx_ratio=1.0,
            wall_time_s=0.1,
        )
        with self.assertRaises(ValidationError):
            record.full_clean()

    def test_admin_export(self):
        config = RunConfig(
            cost=PolynomialCost(gen_qubo(4, seed=2)),
            ansatz=AnsatzConfig(4),
            replicas=2,
            policy=QUICK,
        )
        RunRecord.from_result(run(config), command="solve")
        model_admin = RunRecordAdmin(RunRecord, admin.site)
        response = model_admin.export_selected_runs(None, RunRecord.objects.all())
        self.assertEqual(
            response["Content-Type"],
            "application/vnd.openxmlformats-officedocument.spreadsheetml.sheet",
        )
        ws = load_workbook(io.BytesIO(response.content)).active
        self.assertEqual(ws["A1"].value, "ID")
        self.assertEqual(ws.max_row, 2)


@unittest.skipUnless(ACCEPTANCE, "set DVQOA_ACCEPTANCE=1 for the long campaigns")
class AcceptanceTests(SimpleTestCase):
    def _ratio(self, poly, family, replicas=20, m=None, t=None, seed=0):
        defaults = default_hyperparameters(poly.n, poly.arity)
        config = RunConfig(
            cost=PolynomialCost(poly, family),
            ansatz=AnsatzConfig(
                poly.n, m or defaults[0], t or defaults[1], arity=poly.arity
            ),
            replicas=replicas,
            workers=os.cpu_count() or 1,
            seed=seed,
        )
        optimum = brute_force_poly(poly, workers=os.cpu_count() or 1).optimum
        result = run(config).with_reference(optimum, ReferenceSource.ORACLE)
        return result.approx_ratio

    def test_qubo_ground_truth(self):
        hits = sum(
            self._ratio(gen_qubo(12, seed), ProblemFamily.QUBO) >= 1 - 1e-9
            for seed in range(10)
        )
        self.assertGreaterEqual(hits, 9)

    def test_higher_order(self):
        for k in (3, 4, 5):
            hits = sum(
                self._ratio(
                    gen_higher_order(12, k, 2, seed), ProblemFamily.HIGHER_ORDER
                )
                >= 1 - 1e-9
                for seed in range(10)
            )
            self.assertGreaterEqual(hits, 8, f"k={k}")

    def test_nary(self):
        cells = [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (4, 3), (5, 2), (5, 3)]
        failures = []
        for arity, k in cells:
            hits = sum(
                self._ratio(
                    gen_higher_order(12, k, arity, seed),
                    ProblemFamily.NARY if arity > 2 else ProblemFamily.HIGHER_ORDER,
                    replicas=50,
                )
                >= 1 - 1e-9
                for seed in range(10)
            )
            if hits < 8:
                failures.append(f"N={arity} k={k}: {hits}/10")
        self.assertEqual(failures, [])

    def test_maxcut(self):
        hits = 0
        for seed in range(10):
            _, poly = gen_maxcut(20, seed)
            hits += self._ratio(poly, ProblemFamily.MAXCUT) >= 0.99
        self.assertGreaterEqual(hits, 9)

    def test_tsp(self):
        hits = 0
        for seed in range(10):
            instance = gen_tsp(5, seed)
            config = RunConfig(
                cost=TspCost(instance, encode_tsp(instance)),
                ansatz=AnsatzConfig(25),
                replicas=50,
                workers=os.cpu_count() or 1,
                seed=seed,
            )
            optimum = brute_force_tsp(instance).optimum
            result = run(config).with_reference(optimum, ReferenceSource.ORACLE)
            hits += abs(result.approx_ratio - 1.0) < 1e-9
        self.assertGreaterEqual(hits, 8)

    def test_diagonal_chemistry(self):
        hamiltonian = random_pauli_sum(8, 12, seed=1, diagonal=True)
        config = RunConfig(
            cost=PauliCost(hamiltonian),
            ansatz=AnsatzConfig(8),
            replicas=20,
            workers=os.cpu_count() or 1,
        )
        result = run(config).with_reference(
            dense_min_eigenvalue(hamiltonian), ReferenceSource.ORACLE
        )
        self.assertAlmostEqual(result.approx_ratio, 1.0, places=12)

    def _fit(self, rows, suite):
        return next(f for f in fit_rows(rows) if f.label.startswith(suite + " "))

    def test_eval_scaling_is_linear(self):
        rows = bench("eval_scaling", list(range(64, 1025, 64)), repeats=200)
        self.assertGreaterEqual(self._fit(rows, "eval_scaling").r_squared, 0.95)

    def test_partition_scaling_is_exponential(self):
        rows = bench("partition_scaling", list(range(14, 23)), repeats=3)
        fit = self._fit(rows, "partition_scaling")
        self.assertGreaterEqual(fit.r_squared, 0.95)
        self.assertGreater(fit.slope, 0.5)

    def test_determinism_across_workers(self):
        poly = gen_qubo(12, seed=3)
        dumps = set()
        for workers in (1, 4, 8):
            config = RunConfig(
                cost=PolynomialCost(poly),
                ansatz=AnsatzConfig(12),
                replicas=8,
                workers=workers,
                seed=3,
            )
            data = run(config).to_dict()
            data.pop("wall_time_s")
            dumps.add(json.dumps(data))
        self.assertEqual(len(dumps), 1)

    def test_brute_force_doubles_per_variable(self):
        rows = bench("brute_vs_dvqoa", list(range(16, 25)), replicas=1, policy=QUICK)
        self.assertTrue(1.8 <= doubling_ratio(rows) <= 2.2)
