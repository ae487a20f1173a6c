import os
import tempfile

import numpy as np
from django.test import SimpleTestCase, tag
from scipy import linalg

from clt_verification.exceptions import DomainError, SamplingError, UsageError
from clt_verification.gaussian_processes import (
    FgnIncrement, FracOU, StationarySampler, Tabulated, covariance_eval, fbm_covariance,
    fgn_covariance, frac_ou_covariance_asymptotic, sample_stationary_paths,
)
from clt_verification.numerics import Grid


class CovarianceModelTests(SimpleTestCase):

    def test_fgn_unit_variance(self):
        self.assertEqual(covariance_eval(FgnIncrement(0.75), 0.0), 1.0)

    def test_fgn_limit_ratio(self):
        model = FgnIncrement(0.75)
        T = 1e4
        self.assertAlmostEqual(model.limit_ratio, 0.375)
        self.assertAlmostEqual(covariance_eval(model, T) * T ** 0.5 / 0.375, 1.0, delta=0.02)

    def test_fgn_even(self):
        model = FgnIncrement(0.3)
        self.assertEqual(covariance_eval(model, -2.5), covariance_eval(model, 2.5))

    def test_hurst_domain(self):
        with self.assertRaises(DomainError):
            FgnIncrement(1.0)
        with self.assertRaises(DomainError):
            FracOU(0.5, -1.0)

    def test_frac_ou_standard_case(self):
        model = FracOU(0.5, 1.0, 1.0)
        self.assertAlmostEqual(model.c0, 0.5)
        for s in (0.1, 1.0, 3.0):
            self.assertAlmostEqual(covariance_eval(model, s), 0.5 * np.exp(-s), places=10)

    def test_frac_ou_matches_asymptotic_series(self):
        model = FracOU(0.75, 1.0, 1.0)
        exact = covariance_eval(model, 200.0)
        series = frac_ou_covariance_asymptotic(0.75, 1.0, 1.0, 3, 200.0)
        self.assertAlmostEqual(exact / series, 1.0, delta=1e-6)

    def test_frac_ou_unit_variance(self):
        self.assertAlmostEqual(FracOU.unit_variance(0.7, 2.0).c0, 1.0, places=12)

    def test_fbm_covariance(self):
        self.assertAlmostEqual(fbm_covariance(0.75, 2.0, 1.0), 2 ** 0.5, places=12)

    def test_asymptotic_series_domain(self):
        with self.assertRaises(DomainError):
            frac_ou_covariance_asymptotic(0.5, 1.0, 1.0, 2, 10.0)


class TabulatedTests(SimpleTestCase):

    def test_interpolation(self):
        model = Tabulated((0.0, 1.0, 2.0), (1.0, 0.5, 0.25))
        self.assertAlmostEqual(covariance_eval(model, 1.5), 0.375)
        self.assertAlmostEqual(covariance_eval(model, 2.0), 0.25)

    def test_no_extrapolation_past_last_lag(self):
        model = Tabulated((0.0, 1.0, 2.0), (1.0, 0.5, 0.25))
        with self.assertRaises(DomainError):
            covariance_eval(model, 10.0)
        with self.assertRaises(DomainError):
            StationarySampler(model, Grid(0.0, 4.0, 5))

    def test_validation(self):
        with self.assertRaises(UsageError):
            Tabulated((0.0, 2.0, 1.0), (1.0, 0.5, 0.2))
        with self.assertRaises(DomainError):
            Tabulated((0.0, 1.0), (1.0, 1.5))

    def test_from_csv(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'cov.csv')
            with open(path, 'w') as handle:
                handle.write('lag,value\n0,2.0\n1,1.0\n\n3,0.5\n')
            model = Tabulated.from_csv(path)
        self.assertEqual(model.lags, (0.0, 1.0, 3.0))
        self.assertEqual(model.c0, 2.0)


class SamplerTests(SimpleTestCase):

    def test_fgn_uses_circulant(self):
        sampler = StationarySampler(FgnIncrement(0.75), Grid(0.0, 63.0, 64))
        self.assertEqual(sampler.method, 'circulant')

    def test_empirical_covariance(self):
        ensemble = sample_stationary_paths(FgnIncrement(0.75), Grid(0.0, 63.0, 64), 2000, seed=5)
        paths = ensemble.paths
        self.assertEqual(paths.shape, (2000, 64))
        self.assertAlmostEqual(np.var(paths[:, 10]), 1.0, delta=0.13)
        lag_one = np.corrcoef(paths[:, 20], paths[:, 21])[0, 1]
        self.assertAlmostEqual(lag_one, 0.5 * (2 ** 1.5 - 2), delta=0.08)

    def test_covariance_matrix_is_positive_semidefinite(self):
        models = [
            FgnIncrement(0.25), FgnIncrement(0.75), FracOU.unit_variance(0.3, 1.0), FracOU.unit_variance(0.8, 0.5),
        ]
        for model in models:
            for n_points in (16, 128, 512):
                sampler = StationarySampler(model, Grid(0.0, 0.25 * (n_points - 1), n_points))
                floor = -1e-8 * model.c0
                with self.subTest(model=model, n_points=n_points):
                    if sampler.method == 'circulant':
                        self.assertGreaterEqual(sampler.min_embedding_eigenvalue, floor)
                    self.assertGreaterEqual(linalg.eigvalsh(linalg.toeplitz(sampler.lags)).min(), floor)

    @tag('slow')
    def test_lag_covariances_within_standard_errors(self):
        n = 100000
        paths = sample_stationary_paths(FgnIncrement(0.75), Grid(0.0, 63.0, 64), n, seed=17).paths
        for lag in range(6):
            products = paths[:, 20] * paths[:, 20 + lag]
            se = products.std(ddof=1) / np.sqrt(n)
            with self.subTest(lag=lag):
                self.assertLess(abs(products.mean() - fgn_covariance(0.75, lag)), 4 * se)

    def test_deterministic(self):
        grid = Grid(0.0, 10.0, 41)
        first = sample_stationary_paths(FgnIncrement(0.3), grid, 5, seed=9).paths
        second = sample_stationary_paths(FgnIncrement(0.3), grid, 5, seed=9).paths
        other = sample_stationary_paths(FgnIncrement(0.3), grid, 5, seed=10).paths
        np.testing.assert_array_equal(first, second)
        self.assertFalse(np.array_equal(first, other))

    def test_indefinite_covariance(self):
        model = Tabulated((0.0, 1.0, 2.0), (1.0, 0.99, 0.0))
        with self.assertLogs('clt_verification.sampling', 'WARNING'):
            with self.assertRaises(SamplingError):
                StationarySampler(model, Grid(0.0, 2.0, 3))

    def test_needs_paths(self):
        with self.assertRaises(UsageError):
            sample_stationary_paths(FgnIncrement(0.75), Grid(0.0, 1.0, 3), 0, seed=0)
