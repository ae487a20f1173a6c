from dataclasses import dataclass

import numpy as np
from django.test import SimpleTestCase

from clt_verification.exceptions import EnsembleFailure, UsageError
from clt_verification.mc_engine import MCConfig, build_manifest, content_hash, derive_stream, run_ensemble


@dataclass(frozen=True)
class NormalTask:
    width: int = 3

    def __call__(self, context):
        return {
            'x': float(context.stream().standard_normal()),
            'path': context.stream('path').standard_normal(self.width),
        }


@dataclass(frozen=True)
class IndexTask:

    def __call__(self, context):
        return {'i': float(context.index)}


@dataclass(frozen=True)
class FailingTask:
    bad_index: int

    def __call__(self, context):
        if context.index == self.bad_index:
            raise ValueError('boom')
        return {'i': float(context.index)}


class StreamTests(SimpleTestCase):

    def test_reproducible(self):
        first = derive_stream(7, 3, 'wiener').standard_normal(5)
        second = derive_stream(7, 3, 'wiener').standard_normal(5)
        np.testing.assert_array_equal(first, second)

    def test_distinct_keys(self):
        base = derive_stream(7, 3, 'wiener').random()
        self.assertNotEqual(base, derive_stream(7, 4, 'wiener').random())
        self.assertNotEqual(base, derive_stream(8, 3, 'wiener').random())
        self.assertNotEqual(base, derive_stream(7, 3, 'poisson').random())

    def test_neighbouring_indices_uncorrelated(self):
        first = derive_stream(7, 0).random(10 ** 6)
        second = derive_stream(7, 1).random(10 ** 6)
        self.assertLess(abs(np.corrcoef(first, second)[0, 1]), 0.01)
        self.assertLess(abs(np.corrcoef(first[:-1], first[1:])[0, 1]), 0.01)


class EnsembleTests(SimpleTestCase):

    def test_worker_and_chunk_invariance(self):
        serial = run_ensemble(NormalTask(), MCConfig(40, master_seed=5, workers=1))
        chunked = run_ensemble(NormalTask(), MCConfig(40, master_seed=5, workers=1, chunk=7))
        parallel = run_ensemble(NormalTask(), MCConfig(40, master_seed=5, workers=2, chunk=6))
        for other in (chunked, parallel):
            np.testing.assert_array_equal(serial.samples['x'], other.samples['x'])
            np.testing.assert_array_equal(serial.samples['path'], other.samples['path'])
            self.assertEqual(serial.estimates['x'], other.estimates['x'])

    def test_array_outputs(self):
        result = run_ensemble(NormalTask(width=4), MCConfig(10, master_seed=1))
        self.assertEqual(result.samples['path'].shape, (10, 4))
        self.assertEqual(result.estimates['path'].shape, (4,))
        self.assertIsInstance(result.estimates['x'], float)

    def test_mean_and_standard_error(self):
        n = 11
        result = run_ensemble(IndexTask(), MCConfig(n))
        self.assertAlmostEqual(result.estimates['i'], 5.0)
        self.assertAlmostEqual(result.standard_errors['i'], np.sqrt(n * (n + 1) / 12 / n))
        self.assertEqual(result.as_row(), {'i': result.estimates['i'], 'i_se': result.standard_errors['i']})

    def test_single_replicate(self):
        result = run_ensemble(IndexTask(), MCConfig(1))
        self.assertEqual(result.standard_errors['i'], 0.0)

    def test_failure_reports_indices(self):
        with self.assertLogs('clt_verification.engine', 'ERROR'):
            with self.assertRaises(EnsembleFailure) as caught:
                run_ensemble(FailingTask(3), MCConfig(8))
        self.assertEqual(caught.exception.failed_indices, (3,))
        self.assertEqual(caught.exception.exit_code, 3)

    def test_config_validation(self):
        with self.assertRaises(UsageError):
            MCConfig(0)
        with self.assertRaises(UsageError):
            MCConfig(5, workers=0)


class ManifestTests(SimpleTestCase):

    def test_hash_ignores_key_order(self):
        self.assertEqual(content_hash({'a': 1, 'b': [1, 2]}), content_hash({'b': [1, 2], 'a': 1}))
        self.assertNotEqual(content_hash({'a': 1}), content_hash({'a': 2}))

    def test_manifest_fields(self):
        manifest = build_manifest({'seed': 3}, MCConfig(4, master_seed=3))
        self.assertEqual(manifest['content_hash'], content_hash({'seed': 3}))
        self.assertEqual(manifest['config']['n_replicates'], 4)
        self.assertIn('created_at', manifest)
