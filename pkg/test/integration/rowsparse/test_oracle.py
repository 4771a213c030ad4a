import os
import unittest
from unittest import mock

import numpy as np

from rowsparse.estimator import PenaltyConfig
from rowsparse.harness import ExperimentConfig, compare_rowwise, oracle_gap
from rowsparse.noise import NoiseSpec, make_generator
from rowsparse.packing import sample_pattern


@mock.patch.dict(os.environ, {'ROWSPARSE_SEED': ''})
class OracleCoverageTestCase(unittest.TestCase):
    """
    The constant needed for 95% coverage of the oracle inequality is finite
    and does not move much between independent seeds.
    """

    def report(self, base_seed):

        M = sample_pattern(8, 32, 3, make_generator(5)).to_matrix(10.0)
        cfg = ExperimentConfig([(8, 32, 3)], noise=NoiseSpec.gaussian(1.0),
                               penalty=PenaltyConfig(4.0, a=2.0), trials=500, base_seed=base_seed)
        return oracle_gap(M, cfg, a=2.0, truncations=[1, 2])

    def test_stable_constant(self):

        first, second = self.report(1), self.report(2)
        self.assertTrue(first.passed and second.passed)
        self.assertGreater(first.c_fit, 0.0)
        self.assertLessEqual(abs(first.c_fit - second.c_fit), 0.2 * max(first.c_fit, second.c_fit))
        for report in (first, second):
            self.assertGreaterEqual(report.coverage(report.c_fit), 0.95)
            self.assertFalse(np.any(np.isnan(report.required)))


@mock.patch.dict(os.environ, {'ROWSPARSE_SEED': ''})
class RowwiseAgreementTestCase(unittest.TestCase):
    """
    On strong row-sparse signals the global and the row-wise estimator have
    the same risk.
    """

    def test_strong_signal(self):

        M = sample_pattern(4, 16, 2, make_generator(3)).to_matrix(20.0)
        cfg = ExperimentConfig([(4, 16, 2)], penalty=PenaltyConfig(16.0), trials=200, base_seed=6)
        whole, rowwise, agree = compare_rowwise(M, cfg)
        self.assertTrue(agree)
        self.assertAlmostEqual(whole.mean, rowwise.mean, delta=2 * max(whole.stderr, 1e-12))
