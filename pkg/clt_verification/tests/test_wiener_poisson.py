import numpy as np
from django.test import SimpleTestCase, tag
from scipy import integrate

from clt_verification.exceptions import (
    DomainError, MeasureNormalizationError, UsageError,
)
from clt_verification.levy import AtomsMeasure, TruncatedPowerLaw
from clt_verification.mc_engine import derive_stream
from clt_verification.numerics import Grid
from clt_verification.wiener_poisson import (
    CONJECTURED_RATE_EXPONENT, PREDICTED_RATE_EXPONENT, OuProductConfig, OuProductReplicate, analytic_variance_F_T,
    bound_terms, default_measure, ou_covariance, rate_experiment, simulate_ou_product,
    simulate_ou_product_ensemble,
)


class CovarianceTests(SimpleTestCase):

    def test_diagonal_value(self):
        self.assertAlmostEqual(ou_covariance(1.0, 1.0, 1.0), 1 - np.exp(-2.0), places=14)
        by_quadrature = integrate.quad(lambda u: 2.0 * np.exp(-2.0 * (1.0 - u)), 0.0, 1.0)[0]
        self.assertAlmostEqual(ou_covariance(1.0, 1.0, 1.0), by_quadrature, places=12)

    def test_starts_at_zero_and_saturates(self):
        self.assertEqual(ou_covariance(0.7, 0.0, 3.0), 0.0)
        self.assertAlmostEqual(ou_covariance(0.7, 100.0, 100.0), 1.0, places=12)

    def test_bounded_by_stationary_covariance(self):
        rng = np.random.default_rng(0)
        t, s = rng.uniform(0, 10, (2, 200))
        self.assertTrue(np.all(ou_covariance(1.3, t, s) <= np.exp(-1.3 * np.abs(t - s))))

    def test_negative_time(self):
        with self.assertRaises(DomainError):
            ou_covariance(1.0, -1.0, 1.0)


class AnalyticVarianceTests(SimpleTestCase):

    def test_matches_double_integral(self):
        lam, T = 1.0, 50.0
        value, _ = integrate.dblquad(
            lambda s, t: ou_covariance(lam, t, s) ** 2, 0.0, T, 0.0, lambda t: t, epsabs=0.0, epsrel=1e-11,
        )
        self.assertAlmostEqual(analytic_variance_F_T(lam, T) / (2.0 * value / T), 1.0, delta=1e-7)

    def test_large_horizon(self):
        for lam in (0.5, 1.0, 2.0):
            for T in (100.0, 1000.0):
                self.assertLess(abs(lam * analytic_variance_F_T(lam, T) - 1.0), 10.0 / (lam * T))
        self.assertAlmostEqual(analytic_variance_F_T(2.0, 1e4), 0.5, delta=1e-3)

    def test_domain(self):
        with self.assertRaises(DomainError):
            analytic_variance_F_T(1.0, 0.0)
        with self.assertRaises(DomainError):
            analytic_variance_F_T(0.0, 1.0)


class BoundTermTests(SimpleTestCase):

    def test_reference_values(self):
        report = bound_terms(1.0, default_measure(), 100.0)
        self.assertAlmostEqual(report.term_dF4, 40.0)
        self.assertAlmostEqual(report.term_contraction, 0.08)
        self.assertAlmostEqual(report.term_d2sq, 0.04)
        self.assertEqual(report.predicted_rate_exponent, PREDICTED_RATE_EXPONENT)
        self.assertEqual(report.conjectured_rate_exponent, CONJECTURED_RATE_EXPONENT)

    def test_cube_term_halves(self):
        short = bound_terms(1.0, default_measure(), 100.0).term_cube
        long = bound_terms(1.0, default_measure(), 400.0).term_cube
        self.assertAlmostEqual(long / short, 0.5, places=12)

    def test_heavy_power_law_has_finite_terms(self):
        heavy = TruncatedPowerLaw(0.9, 1.0, 1.0)
        self.assertGreater(bound_terms(1.0, heavy, 10.0).term_cube, 0.0)
        with self.assertRaises(DomainError):
            bound_terms(-1.0, default_measure(), 10.0)


class ConfigTests(SimpleTestCase):

    def test_normalization(self):
        with self.assertRaises(MeasureNormalizationError):
            OuProductConfig(1.0, AtomsMeasure(((2.0, 0.5), (-2.0, 0.5))))

    def test_finite_activity_required(self):
        with self.assertRaises(UsageError):
            OuProductConfig(1.0, TruncatedPowerLaw(0.0, 1.0, 1.0))

    def test_grid_arguments(self):
        with self.assertRaises(UsageError):
            OuProductConfig(1.0, T=1.0, dt=2.0)
        with self.assertRaises(DomainError):
            OuProductConfig(0.0)


class SimulationTests(SimpleTestCase):

    def test_terminal_moments(self):
        config = OuProductConfig(1.0, T=5.0, dt=0.1, n=2000, seed=3)
        samples = simulate_ou_product_ensemble(config).samples
        target = 1 - np.exp(-10.0)
        self.assertAlmostEqual(np.var(samples['Y_T'], ddof=1), target, delta=0.13)
        self.assertAlmostEqual(np.var(samples['Z_T'], ddof=1), target, delta=0.16)
        self.assertLess(abs(np.corrcoef(samples['Y_T'], samples['Z_T'])[0, 1]), 4 / np.sqrt(2000))
        F = samples['F_T']
        self.assertLess(abs(F.mean()), 4 * F.std(ddof=1) / np.sqrt(F.size))

    def test_compensated_asymmetric_jumps(self):
        measure = AtomsMeasure(((1.0, 0.8), (-2.0, 0.05)))
        samples = simulate_ou_product_ensemble(OuProductConfig(1.0, measure, T=5.0, n=2000, seed=5)).samples
        Z = samples['Z_T']
        self.assertLess(abs(Z.mean()), 4 * Z.std(ddof=1) / np.sqrt(Z.size))

    def test_deterministic(self):
        config = OuProductConfig(0.5, T=10.0, dt=0.5, n=20, seed=1)
        np.testing.assert_array_equal(simulate_ou_product(config), simulate_ou_product(config))

    def test_rate_experiment_validation(self):
        with self.assertRaises(UsageError):
            rate_experiment(1.0, default_measure(), [4, 8, 16, 32], 1, seed=0)
        with self.assertRaises(UsageError):
            rate_experiment(1.0, default_measure(), [4, 8, 16], 10, seed=0)
        with self.assertRaises(UsageError):
            rate_experiment(1.0, default_measure(), [4, 8, 12, 16], 10, seed=0)

    def test_rate_experiment_rows(self):
        experiment = rate_experiment(1.0, default_measure(), [4, 8, 16, 32], 30, seed=2, dt=0.5)
        self.assertEqual([row.T for row in experiment.rows], [4.0, 8.0, 16.0, 32.0])
        self.assertEqual(experiment.fit.n_points, 4)
        self.assertEqual(experiment.predicted_rate_exponent, -0.25)
        self.assertGreaterEqual(experiment.slope_se, 0.0)
        for row in experiment.rows:
            self.assertAlmostEqual(row.var_analytic, analytic_variance_F_T(1.0, row.T))
            self.assertGreater(row.noise_floor, 0.0)
            self.assertGreater(row.var_conditional, 0.0)
            self.assertGreaterEqual(row.dW_conditional, 0.0)

    def test_conditional_variance_is_mean_of_S(self):
        samples = simulate_ou_product_ensemble(OuProductConfig(1.0, T=20.0, dt=0.1, n=4000, seed=13)).samples
        F, S = samples['F_T'], samples['S_T']
        n = F.size
        var_se = np.sqrt((np.mean((F - F.mean()) ** 4) - np.var(F) ** 2) / n)
        se = np.hypot(var_se, S.std(ddof=1) / np.sqrt(n))
        self.assertLess(abs(np.var(F, ddof=1) - S.mean()), 4 * se)


class _FixedPoissonContext:
    """Same Poisson path for every replicate, fresh Wiener innovations"""

    def __init__(self, wiener_index):
        self.wiener_index = wiener_index

    def stream(self, component_tag='main'):
        index = 0 if component_tag == 'poisson' else self.wiener_index
        return derive_stream(7, index, component_tag)


class ConditionalGaussianTests(SimpleTestCase):

    def test_S_T_is_variance_given_jumps(self):
        task = OuProductReplicate(1.0, default_measure(), Grid.from_step(10.0, 0.1), 0.0)
        outputs = [task(_FixedPoissonContext(index)) for index in range(3000)]
        S = np.array([output['S_T'] for output in outputs])
        F = np.array([output['F_T'] for output in outputs])
        self.assertEqual(np.ptp(S), 0.0)
        self.assertGreater(S[0], 0.0)
        self.assertLess(abs(np.var(F, ddof=1) / S[0] - 1.0), 4 * np.sqrt(2 / F.size))
        self.assertLess(abs(F.mean()), 4 * np.sqrt(S[0] / F.size))


class StatisticalAcceptanceTests(SimpleTestCase):

    @tag('slow')
    def test_variance_matches_analytic(self):
        samples = simulate_ou_product(OuProductConfig(1.0, T=200.0, dt=0.1, n=20000, seed=11))
        n = samples.size
        centered = samples - samples.mean()
        se = np.sqrt((np.mean(centered ** 4) - np.mean(centered ** 2) ** 2) / n)
        self.assertLess(abs(np.var(samples, ddof=1) - analytic_variance_F_T(1.0, 200.0)), 4 * se)

    @tag('slow')
    def test_rate_slope(self):
        experiment = rate_experiment(1.0, default_measure(), [32, 64, 128, 256, 512, 1024], 10000, seed=1, dt=0.1)
        self.assertLessEqual(experiment.fit.slope, -0.15)
        self.assertLess(experiment.rows[-1].dW_conditional, experiment.rows[0].dW_conditional)
        for row in experiment.rows:
            self.assertGreater(row.dW_conditional, 2 * row.se_conditional)
