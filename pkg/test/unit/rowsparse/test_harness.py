import json
import math
import os
import shutil
import tempfile
import unittest
from unittest import mock

import numpy as np

from rowsparse.core import RealMatrix, SparsityClass, in_class, l0_count
from rowsparse.estimator import PenaltyConfig
from rowsparse.exceptions import (CapacityError, DegenerateGridError, InvalidConfigError,
                                  ParameterDomainError)
from rowsparse.harness import (ExperimentConfig, compare_rowwise, grid_signal, mc_risk, oracle_gap,
                               projected_noise_stat, projected_noise_stat_bruteforce, rate_sweep,
                               soft_signal, tail_check, tail_deltas, worst_case_signal)
from rowsparse.noise import NoiseSpec
from rowsparse.packing import hard_amplitude

no_seed_override = mock.patch.dict(os.environ, {'ROWSPARSE_SEED': ''})


@no_seed_override
class ExperimentConfigTestCase(unittest.TestCase):

    def test_defaults(self):

        cfg = ExperimentConfig([(2, 8, 1)])
        self.assertEqual(cfg.base_seed, 20160412)
        self.assertEqual(cfg.noise, NoiseSpec.gaussian(1.0))
        self.assertEqual(cfg.penalty.lam, 4.0)
        self.assertEqual((cfg.gamma, cfg.workers, cfg.estimator), (0.5, 1, 'pls'))

    def test_validation(self):

        with self.assertRaises(ParameterDomainError):
            ExperimentConfig([])
        with self.assertRaises(ParameterDomainError):
            ExperimentConfig([(2, 8)])
        with self.assertRaises(ParameterDomainError):
            ExperimentConfig([(2, 8, 1)], trials=0)
        with self.assertRaises(ParameterDomainError):
            ExperimentConfig([(2, 8, 1)], estimator='lasso')

    def test_required_and_unknown_keys(self):

        with self.assertRaises(InvalidConfigError):
            ExperimentConfig.from_dict({'trials': 10})
        with self.assertRaises(InvalidConfigError):
            ExperimentConfig.from_dict({'grid': [[2, 8, 1]], 'lambda': 4})

    def test_values_are_typed(self):

        with self.assertRaises(InvalidConfigError) as ctx:
            ExperimentConfig.from_dict({'grid': [[2, 8, 1]], 'trials': 'many'})
        self.assertIn("'trials'", str(ctx.exception))
        with self.assertRaises(InvalidConfigError) as ctx:
            ExperimentConfig.from_dict({'grid': [[2, 8.5, 1]]})
        self.assertIn("'grid'", str(ctx.exception))
        with self.assertRaises(ParameterDomainError):
            ExperimentConfig.from_dict({'grid': [[2, 8, 1]], 'noise': {'family': 'gaussian',
                                                                       'param': 'abc'}})
        cfg = ExperimentConfig.from_dict({'grid': [['2', 8, 1.5]], 'p': '2', 'trials': '7'})
        self.assertEqual((cfg.grid, cfg.p, cfg.trials), ([(2, 8, 1.5)], 2.0, 7))

    def test_dict(self):

        cfg = ExperimentConfig.from_dict({
            'grid': [[2, 8, 1], [4, 8, 1]],
            'noise': {'family': 'rademacher', 'param': 2.0},
            'penalty': {'lambda': 16.0},
            'trials': 7,
            'base_seed': 3,
        })
        self.assertEqual(cfg.grid, [(2, 8, 1), (4, 8, 1)])
        self.assertEqual(cfg.noise.family, 'rademacher')
        again = ExperimentConfig.from_dict(cfg.to_dict())
        self.assertEqual(again.to_dict(), cfg.to_dict())

    def test_load(self):

        tmp = tempfile.mkdtemp()
        try:
            path = os.path.join(tmp, 'exp.json')
            with open(path, 'w') as f:
                json.dump({'grid': [[2, 8, 1]], 'base_seed': 11}, f)
            self.assertEqual(ExperimentConfig.load(path).base_seed, 11)
            with open(path, 'w') as f:
                f.write('{grid')
            with self.assertRaises(InvalidConfigError):
                ExperimentConfig.load(path)
        finally:
            shutil.rmtree(tmp)

    def test_trial_noise_streams(self):

        cfg = ExperimentConfig([(2, 8, 1)], base_seed=9)
        spec = cfg.trial_noise(2, 5)
        self.assertEqual((spec.seed, spec.stream), (9, (0, 2, 5)))

    def test_environment_seed(self):

        with mock.patch.dict(os.environ, {'ROWSPARSE_SEED': '123'}):
            self.assertEqual(ExperimentConfig([(2, 8, 1)], base_seed=9).base_seed, 123)


class SignalTestCase(unittest.TestCase):

    def test_worst_case_single_entry(self):

        M = worst_case_signal(1, 2, 1, 1.0, 0.5, seed=3)
        self.assertEqual(l0_count(M), 1)
        self.assertAlmostEqual(np.abs(M.entries).max(), 0.5 * math.sqrt(math.log(2 * math.e)),
                               places=14)

    def test_worst_case_in_class(self):

        for seed in range(10):
            M = worst_case_signal(4, 16, 2, 1.3, 0.5, seed=seed)
            self.assertTrue(in_class(M, SparsityClass(0, 2)))
            self.assertTrue(np.all(np.count_nonzero(M.entries, axis=1) == 2))
            nonzero = M.entries[M.entries != 0]
            self.assertTrue(np.allclose(nonzero, hard_amplitude(16, 2, 1.3, 0.5), rtol=0, atol=0))

    def test_worst_case_domain(self):

        with self.assertRaises(ParameterDomainError):
            worst_case_signal(2, 16, 9, 1.0, 0.5, seed=0)
        with self.assertRaises(ParameterDomainError):
            worst_case_signal(2, 16, 2, 1.0, 1.0, seed=0)

    def test_soft_signal_in_class(self):

        for q in (0.5, 1.0, 1.5):
            M = soft_signal(3, 10, q, 2.0, seed=4)
            self.assertTrue(in_class(M, SparsityClass(q, 2.0)))
            self.assertEqual(l0_count(M), 30)

    def test_soft_signal_domain(self):

        with self.assertRaises(ParameterDomainError):
            soft_signal(3, 10, 2.0, 2.0, seed=4)
        with self.assertRaises(ParameterDomainError):
            soft_signal(3, 10, 1.0, 0.0, seed=4)


@no_seed_override
class MonteCarloRiskTestCase(unittest.TestCase):

    def test_deterministic(self):

        cfg = ExperimentConfig([(2, 8, 1)], trials=20, base_seed=5)
        M = worst_case_signal(2, 8, 1, 1.0, 0.5, seed=1)
        self.assertEqual(mc_risk(M, cfg), mc_risk(M, cfg))

    def test_workers_do_not_change_results(self):

        M = worst_case_signal(4, 16, 2, 1.0, 0.5, seed=1)
        serial = mc_risk(M, ExperimentConfig([(4, 16, 2)], trials=40, base_seed=5, workers=1))
        threaded = mc_risk(M, ExperimentConfig([(4, 16, 2)], trials=40, base_seed=5, workers=4))
        self.assertEqual(serial, threaded)
        self.assertEqual(serial.to_dict()['mean'], threaded.to_dict()['mean'])

    def test_large_penalty_kills_pure_noise(self):

        cfg = ExperimentConfig([(4, 8, 1)], penalty=PenaltyConfig(100.0), trials=50, base_seed=2)
        self.assertEqual(mc_risk(RealMatrix.zeros(4, 8), cfg).mean, 0.0)

    def test_vanishing_noise(self):

        cfg = ExperimentConfig([(2, 4, 1)], noise=NoiseSpec.gaussian(1e-12), trials=20, base_seed=2)
        self.assertLessEqual(mc_risk(RealMatrix.zeros(2, 4), cfg).mean, 1e-20)

    def test_report_fields(self):

        cfg = ExperimentConfig([(2, 8, 1)], trials=5, base_seed=5, p=1.0)
        report = mc_risk(RealMatrix.zeros(2, 8), cfg, label='hard')
        self.assertEqual((report.n1, report.n2, report.s, report.p, report.trials),
                         (2, 8, 1, 1.0, 5))
        self.assertEqual(report.label, 'hard')

    def test_grid_signal(self):

        cfg = ExperimentConfig([(2, 8, 1), (4, 8, 1)], base_seed=5)
        M, rate = grid_signal(cfg, 1, 'hard')
        self.assertEqual(M.shape, (4, 8))
        M_again, _ = grid_signal(cfg, 1, 'hard')
        self.assertEqual(M, M_again)
        self.assertGreater(rate, 0)


@no_seed_override
class RateSweepTestCase(unittest.TestCase):

    def test_too_few_points(self):

        with self.assertRaises(DegenerateGridError):
            rate_sweep(ExperimentConfig([(2, 8, 1), (4, 8, 1)], trials=2))

    def test_identical_points(self):

        with self.assertRaises(DegenerateGridError):
            rate_sweep(ExperimentConfig([(2, 8, 1)] * 4, trials=2))

    def test_domain(self):

        grid = [(1, 16, 1), (2, 16, 1), (4, 16, 1), (8, 16, 1)]
        with self.assertRaises(ParameterDomainError):
            rate_sweep(ExperimentConfig(grid, trials=2), rate='medium')
        with self.assertRaises(ParameterDomainError):
            rate_sweep(ExperimentConfig(grid, trials=2, p=3.0))
        with self.assertRaises(ParameterDomainError):
            rate_sweep(ExperimentConfig(grid, trials=2, p=1.0, q=1.0), rate='soft')

    def test_small_sweep(self):

        grid = [(1, 16, 1), (2, 16, 1), (4, 16, 1), (8, 16, 1)]
        fit = rate_sweep(ExperimentConfig(grid, trials=10, base_seed=1))
        self.assertEqual(len(fit.risks), 4)
        self.assertTrue(0.0 <= fit.r_squared <= 1.0)
        self.assertEqual(fit.rates, sorted(fit.rates))


@no_seed_override
class OracleGapTestCase(unittest.TestCase):

    def test_zero_signal(self):

        cfg = ExperimentConfig([(3, 6, 1)], trials=40, base_seed=8)
        report = oracle_gap(RealMatrix.zeros(3, 6), cfg)
        for lhs, required in zip(report.lhs, report.required):
            self.assertIn(required, (0.0, float('inf')))
            self.assertEqual(required == 0.0, lhs <= report.slack)

    def test_coverage_nondecreasing(self):

        cfg = ExperimentConfig([(3, 6, 1)], trials=40, base_seed=8)
        probe = RealMatrix([[1.0, 0, 0, 0, 0, 0]] * 3)
        report = oracle_gap(RealMatrix.zeros(3, 6), cfg, probes=[probe])
        values = [report.coverage(c) for c in np.linspace(0, 5, 30)]
        self.assertEqual(values, sorted(values))

    def test_noiseless_trials_are_covered(self):

        M = RealMatrix([[5.0, 0, 0, 0], [0, 5.0, 0, 0]])
        cfg = ExperimentConfig([(2, 4, 1)], noise=NoiseSpec.gaussian(1e-12),
                               penalty=PenaltyConfig(4.0), trials=20, base_seed=8)
        report = oracle_gap(M, cfg, delta=1.0)
        self.assertEqual(report.slack, 8.0)
        self.assertTrue(np.all(report.lhs <= 1e-20))
        self.assertEqual(report.coverage(0.0), 1.0)
        self.assertEqual(report.c_fit, 0.0)

    def test_truncation_probes(self):

        M = worst_case_signal(3, 8, 2, 1.0, 0.5, seed=2)
        cfg = ExperimentConfig([(3, 8, 2)], trials=10, base_seed=8)
        report = oracle_gap(M, cfg, truncations=[1, 2])
        self.assertEqual(report.required.size, 10)
        self.assertTrue(np.all(report.required >= 0))

    def test_a_domain(self):

        cfg = ExperimentConfig([(2, 4, 1)], trials=2)
        with self.assertRaises(ParameterDomainError):
            oracle_gap(RealMatrix.zeros(2, 4), cfg, a=1.0)


class ProjectedNoiseTestCase(unittest.TestCase):

    def test_total_energy_without_penalty(self):

        self.assertEqual(projected_noise_stat(RealMatrix([[1, 2], [3, 0]]), 0.0), 14.0)

    def test_zero_noise(self):

        value = projected_noise_stat(RealMatrix.zeros(2, 3), 1.5)
        self.assertAlmostEqual(value, -1.5 * math.log(6 * math.e), places=12)

    def test_matches_enumeration(self):

        rng = np.random.default_rng(12)
        for _ in range(30):
            E = RealMatrix(rng.standard_normal((2, 3)))
            for K1 in (0.0, 0.3, 1.0):
                self.assertEqual(projected_noise_stat(E, K1), projected_noise_stat_bruteforce(E, K1))

    def test_enumeration_capacity(self):

        with self.assertRaises(CapacityError):
            projected_noise_stat_bruteforce(RealMatrix.zeros(4, 5), 1.0)

    def test_negative_K1(self):

        with self.assertRaises(ParameterDomainError):
            projected_noise_stat(RealMatrix.zeros(2, 2), -1.0)


class TailCheckTestCase(unittest.TestCase):

    def test_minimum_trials(self):

        with self.assertRaises(ParameterDomainError):
            tail_check(NoiseSpec.gaussian(), 2, 4, 1.0, 99)

    def test_default_grid(self):

        deltas = tail_deltas(2.0)
        self.assertEqual(deltas.size, 20)
        self.assertAlmostEqual(deltas[0], 0.4, places=12)
        self.assertAlmostEqual(deltas[-1], 200.0, places=9)

    def test_huge_K1(self):

        curve = tail_check(NoiseSpec.gaussian(), 4, 8, 1000.0, 100, base_seed=1, deltas=[0.0, 1.0])
        self.assertTrue(np.all(curve.stats < 0))
        self.assertEqual(curve.exceedance.tolist(), [0.0, 0.0])

    def test_curve(self):

        curve = tail_check(NoiseSpec.rademacher(), 4, 8, 1.0, 100, base_seed=1)
        self.assertTrue(curve.monotone)
        self.assertTrue(curve.passed)
        again = tail_check(NoiseSpec.rademacher(), 4, 8, 1.0, 100, base_seed=1, workers=3)
        self.assertTrue(np.array_equal(curve.stats, again.stats))


@no_seed_override
class CompareRowwiseTestCase(unittest.TestCase):

    def test_same_noise_draws(self):

        M = worst_case_signal(4, 16, 2, 1.0, 0.5, seed=6)
        cfg = ExperimentConfig([(4, 16, 2)], trials=30, base_seed=4)
        whole, rowwise, agree = compare_rowwise(M, cfg)
        self.assertEqual((whole.label, rowwise.label), ('pls', 'rowwise'))
        self.assertEqual(whole, mc_risk(M, cfg, label='pls'))
        spread = 2 * math.sqrt(whole.stderr ** 2 + rowwise.stderr ** 2)
        self.assertEqual(agree, abs(whole.mean - rowwise.mean) <= spread)
