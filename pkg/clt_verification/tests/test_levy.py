import numpy as np
from django.test import SimpleTestCase, tag
from scipy import stats

from clt_verification.exceptions import DivergentMomentError, DomainError, NoSmallJumpsError, UsageError
from clt_verification.levy import (
    BIG, SMALL, AtomsMeasure, ConstantKernel, ExponentialKernel, PowerKernel, TabulatedDensity,
    TruncatedPowerLaw, asmussen_rosinski_diagnostic, finite_dimensional_conditions,
    first_chaos_poincare_check, get_kernel, measure_moment, sample_big_jumps,
    small_jump_clt_experiment, small_jump_layers, third_moment_ratio, weighted_small_jump_condition,
)
from clt_verification.mc_engine import derive_stream
from clt_verification.numerics import loglog_slope

SYMMETRIC_ATOMS = AtomsMeasure(((1.0, 0.5), (-1.0, 0.5)))


class MomentTests(SimpleTestCase):

    def test_power_law_small_moments(self):
        measure = TruncatedPowerLaw(0.0, 1.0, 1.0)
        self.assertAlmostEqual(measure_moment(measure, 2, SMALL, 0.1), 0.2, places=14)
        self.assertAlmostEqual(measure_moment(measure, 3, SMALL, 0.1), 0.01, places=14)
        self.assertAlmostEqual(third_moment_ratio(measure, 0.1), 0.111803, places=6)

    def test_closed_form_matches_quadrature(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            delta = rng.uniform(-0.9, 0.9)
            a, b = rng.uniform(0.5, 2.0, 2)
            epsilon = rng.uniform(0.05, min(a, b))
            p = 1 + delta + rng.uniform(0.2, 3.0)
            measure = TruncatedPowerLaw(delta, a, b)
            for lo, hi in ((0.0, epsilon), (epsilon, np.inf)):
                closed = measure.slice_moment(p, lo, hi)
                numeric = measure.integrate(lambda x: 1.0, p, lo, hi)
                self.assertAlmostEqual(numeric / closed, 1.0, delta=1e-8)

    def test_ratio_scales_with_epsilon(self):
        measure = TruncatedPowerLaw(0.5, 1.0, 1.0)
        epsilons = [0.01, 0.02, 0.04, 0.08]
        fit = loglog_slope(epsilons, [third_moment_ratio(measure, e) for e in epsilons])
        self.assertAlmostEqual(fit.slope, 0.75, places=10)

    def test_atoms(self):
        self.assertEqual(measure_moment(SYMMETRIC_ATOMS, 2), 1.0)
        self.assertEqual(measure_moment(SYMMETRIC_ATOMS, 2, BIG, 0.5), 1.0)
        self.assertIsNone(third_moment_ratio(SYMMETRIC_ATOMS, 0.5))

    def test_divergent_moments(self):
        measure = TruncatedPowerLaw(0.0, 1.0, 1.0)
        with self.assertRaises(DivergentMomentError):
            measure_moment(measure, 1, SMALL, 0.1)
        with self.assertRaises(DivergentMomentError):
            measure_moment(measure, 0.5, SMALL, 0.1)

    def test_invalid_arguments(self):
        with self.assertRaises(DomainError):
            measure_moment(SYMMETRIC_ATOMS, 0)
        with self.assertRaises(DomainError):
            measure_moment(SYMMETRIC_ATOMS, 2, SMALL, None)
        with self.assertRaises(DomainError):
            AtomsMeasure(((0.0, 1.0),))
        with self.assertRaises(DomainError):
            TruncatedPowerLaw(1.0, 1.0, 1.0)

    def test_tabulated_density(self):
        measure = TabulatedDensity((-2.0, -1.0, 1.0, 2.0), (1.0, 1.0, 1.0, 1.0))
        self.assertAlmostEqual(measure.mass(), 2.0, places=10)
        self.assertAlmostEqual(measure.slice_moment(2), 14.0 / 3.0, places=9)
        self.assertAlmostEqual(measure.signed_moment(), 0.0, places=10)
        sizes = measure.sample_slice(np.random.default_rng(1), 500)
        self.assertTrue(np.all((np.abs(sizes) >= 1.0) & (np.abs(sizes) <= 2.0)))


class KernelTests(SimpleTestCase):

    def test_constant_kernel_reduces_to_measure_ratio(self):
        measure = TruncatedPowerLaw(0.0, 1.0, 1.0)
        self.assertAlmostEqual(
            weighted_small_jump_condition(measure, ConstantKernel(1.0), 1.0, 0.1),
            third_moment_ratio(measure, 0.1), places=12,
        )
        self.assertAlmostEqual(
            weighted_small_jump_condition(measure, ConstantKernel(3.0), 1.0, 0.1),
            third_moment_ratio(measure, 0.1), places=12,
        )

    def test_tensor_quadrature_matches_factored_form(self):
        measure = TruncatedPowerLaw(0.3, 1.0, 2.0)
        kernel = ExponentialKernel(1.0)
        factored = weighted_small_jump_condition(measure, kernel, 1.0, 0.1)
        tensor = weighted_small_jump_condition(measure, kernel, 1.0, 0.1, tensor=True)
        self.assertAlmostEqual(tensor / factored, 1.0, delta=1e-8)

    def test_no_small_jumps(self):
        with self.assertRaises(NoSmallJumpsError):
            weighted_small_jump_condition(SYMMETRIC_ATOMS, ConstantKernel(), 1.0, 0.5)

    def test_time_moments(self):
        self.assertAlmostEqual(ExponentialKernel(2.0).time_moment(1.0, 2), (1 - np.exp(-4.0)) / 4.0)
        self.assertAlmostEqual(PowerKernel(0.5).time_moment(4.0, 2), 8.0)

    def test_registry(self):
        self.assertEqual(get_kernel('constant'), ConstantKernel(1.0))
        self.assertEqual(get_kernel('exponential', 0.5), ExponentialKernel(0.5))
        with self.assertRaises(UsageError):
            get_kernel('power')
        with self.assertRaises(UsageError):
            get_kernel('gaussian', 1.0)
        with self.assertRaises(DomainError):
            PowerKernel(-0.5)


class BigJumpTests(SimpleTestCase):

    def test_mean_count(self):
        counts = [sample_big_jumps(SYMMETRIC_ATOMS, 0.5, 100.0, seed=3, index=i).count for i in range(400)]
        self.assertLess(abs(np.mean(counts) - 100.0), 4 * np.sqrt(100.0 / 400))

    def test_times_sorted_in_window(self):
        path = sample_big_jumps(SYMMETRIC_ATOMS, 0.5, 10.0, seed=1)
        self.assertTrue(np.all(np.diff(path.times) >= 0))
        self.assertTrue(np.all((path.times >= 0) & (path.times <= 10.0)))
        self.assertTrue(np.all(np.abs(path.sizes) >= 0.5))

    def test_mean_size(self):
        measure = AtomsMeasure(((1.0, 0.7), (-2.0, 0.3)))
        sizes = np.concatenate([sample_big_jumps(measure, 0.5, 50.0, seed=8, index=i).sizes for i in range(200)])
        expected = measure.signed_moment(0.5, np.inf) / measure.mass(0.5, np.inf)
        self.assertAlmostEqual(sizes.mean(), expected, delta=0.06)

    def test_power_law_sizes(self):
        measure = TruncatedPowerLaw(0.0, 1.0, 1.0)
        sizes = measure.sample_slice(derive_stream(2, 0, 'jumps'), 20000, 0.1, np.inf)

        def cdf(x):
            x = np.asarray(x, dtype=float)
            return np.where(x < 0, (-1.0 / x - 1.0) / 18.0, (19.0 - 1.0 / x) / 18.0)

        statistic = stats.kstest(sizes, cdf).statistic
        self.assertLess(statistic, 1.95 / np.sqrt(sizes.size))

    def test_deterministic(self):
        first = sample_big_jumps(SYMMETRIC_ATOMS, 0.5, 20.0, seed=5, index=2)
        second = sample_big_jumps(SYMMETRIC_ATOMS, 0.5, 20.0, seed=5, index=2)
        np.testing.assert_array_equal(first.times, second.times)
        np.testing.assert_array_equal(first.sizes, second.sizes)

    def test_invalid(self):
        with self.assertRaises(DomainError):
            sample_big_jumps(SYMMETRIC_ATOMS, 0.0, 1.0, seed=0)


class SmallJumpExperimentTests(SimpleTestCase):

    def test_layers_cover_down_to_floor(self):
        measure = TruncatedPowerLaw(0.0, 1.0, 1.0)
        layers, remainder_sd = small_jump_layers(measure, ConstantKernel(), 1.0, 0.1, 64)
        self.assertEqual(len(layers), 6)
        self.assertAlmostEqual(layers[0].hi, 0.1)
        self.assertAlmostEqual(layers[-1].lo, 0.1 / 64)
        self.assertAlmostEqual(remainder_sd, np.sqrt(2 * 0.1 / 64), places=12)

    def test_finite_activity_single_layer(self):
        measure = AtomsMeasure(((0.05, 1.0), (1.0, 1.0)))
        layers, remainder_sd = small_jump_layers(measure, ConstantKernel(), 2.0, 0.1)
        self.assertEqual(len(layers), 1)
        self.assertAlmostEqual(layers[0].compensator, 0.1)
        self.assertEqual(remainder_sd, 0.0)

    def test_standardized(self):
        measure = TruncatedPowerLaw(0.0, 1.0, 1.0)
        rows = small_jump_clt_experiment(measure, ConstantKernel(), 1.0, [0.1], 400, seed=6)
        row = rows[0]
        self.assertEqual(row.n, 400)
        self.assertAlmostEqual(row.third_moment_ratio, 0.111803, places=6)
        self.assertAlmostEqual(row.sample_variance, 1.0, delta=0.3)
        self.assertGreater(row.dW, 0.0)

    def test_no_small_jumps(self):
        with self.assertRaises(NoSmallJumpsError):
            small_jump_clt_experiment(SYMMETRIC_ATOMS, ConstantKernel(), 1.0, [0.5], 10, seed=0)

    def test_floor_is_pushed_down(self):
        measure = TruncatedPowerLaw(0.0, 1.0, 1.0)
        row = small_jump_clt_experiment(measure, ConstantKernel(), 1.0, [0.1], 200, seed=6, max_floor_divisor=256)[0]
        self.assertEqual(row.floor_divisor, 256)
        self.assertGreater(row.noise_floor, 0.0)

    def test_floor_loop_reports_unsettled(self):
        measure = TruncatedPowerLaw(0.0, 1.0, 1.0)
        with self.assertLogs('clt_verification.sampling', 'WARNING'):
            row = small_jump_clt_experiment(
                measure, ConstantKernel(), 1.0, [0.1], 100, seed=6, floor_divisor=64, max_floor_divisor=64,
            )[0]
        self.assertFalse(row.settled)
        self.assertEqual(row.floor_divisor, 64)

    def test_finite_activity_needs_no_floor(self):
        measure = AtomsMeasure(((0.05, 1.0), (-0.05, 1.0), (1.0, 1.0)))
        row = small_jump_clt_experiment(measure, ConstantKernel(), 5.0, [0.1], 100, seed=2)[0]
        self.assertTrue(row.settled)
        self.assertEqual(row.floor_divisor, 64)

    def test_floor_bounds(self):
        with self.assertRaises(UsageError):
            small_jump_clt_experiment(
                TruncatedPowerLaw(0.0, 1.0, 1.0), ConstantKernel(), 1.0, [0.1], 10, seed=0,
                floor_divisor=256, max_floor_divisor=64,
            )

    @tag('slow')
    def test_distance_decreases_with_epsilon(self):
        # d_W depends on t / eps only; a short horizon keeps it well above the sampling floor
        measure = TruncatedPowerLaw(0.0, 1.0, 1.0)
        epsilons = [0.2, 0.1, 0.05]
        rows = small_jump_clt_experiment(measure, ConstantKernel(), 0.002, epsilons, 10000, seed=3)
        for wider, narrower in zip(rows, rows[1:]):
            self.assertLess(narrower.dW, wider.dW - 2 * np.hypot(wider.se, narrower.se))
        for row in rows:
            self.assertGreater(row.dW, 2 * row.noise_floor)
        fit = loglog_slope(epsilons, [row.third_moment_ratio for row in rows])
        self.assertAlmostEqual(fit.slope, 0.5, delta=0.02)


class DiagnosticTests(SimpleTestCase):

    def test_asmussen_rosinski(self):
        epsilons, ratios, growing = asmussen_rosinski_diagnostic(TruncatedPowerLaw(0.0, 1.0, 1.0), [0.05, 0.2, 0.1])
        np.testing.assert_array_equal(epsilons, [0.2, 0.1, 0.05])
        np.testing.assert_allclose(ratios, np.sqrt(2.0 / epsilons))
        self.assertTrue(growing)
        self.assertFalse(asmussen_rosinski_diagnostic(AtomsMeasure(((0.3, 1.0),)), [0.5, 0.25])[2])

    def test_finite_dimensional_covariance(self):
        report = finite_dimensional_conditions(TruncatedPowerLaw(0.0, 1.0, 1.0), ConstantKernel(), [1.0, 2.0], 0.1)
        self.assertAlmostEqual(report.covariance[0, 0], 1.0)
        self.assertAlmostEqual(report.covariance[0, 1], 1.0 / np.sqrt(2.0), places=10)
        self.assertTrue(np.all(report.third_order_terms > 0))

    @tag('slow')
    def test_first_chaos_poincare_equality(self):
        check = first_chaos_poincare_check(SYMMETRIC_ATOMS, ConstantKernel(), 10.0, 0.5, 2000, seed=4,
                                           wiener_weight=1.0)
        self.assertEqual(check.kernel_norm, 20.0)
        self.assertLess(abs(check.z_score), 4.0)

    @tag('slow')
    def test_random_first_chaos_functionals(self):
        rng = np.random.default_rng(21)
        for case in range(10):
            count = int(rng.integers(1, 4))
            atoms = tuple(
                (float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0)), float(rng.uniform(0.5, 1.5)))
                for _ in range(count)
            )
            kernel = [
                ConstantKernel(float(rng.uniform(0.5, 2.0))),
                ExponentialKernel(float(rng.uniform(0.2, 2.0))),
                PowerKernel(float(rng.uniform(0.0, 1.0))),
            ][case % 3]
            t = float(rng.uniform(2.0, 6.0))
            weight = float(rng.uniform(0.0, 1.5))
            check = first_chaos_poincare_check(AtomsMeasure(atoms), kernel, t, 0.1, 4000, seed=case,
                                               wiener_weight=weight)
            with self.subTest(case=case, atoms=atoms, kernel=kernel, t=t, wiener_weight=weight):
                self.assertLessEqual(check.sample_variance, check.kernel_norm + 4 * check.standard_error)
                self.assertLess(abs(check.z_score), 4.0)
