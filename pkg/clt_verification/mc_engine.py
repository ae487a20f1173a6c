# clt_verification/mc_engine.py

"""
Monte Carlo orchestration.

Every replicate draws from its own counter-based stream, keyed by a 64-bit
mix of (master_seed, replicate_index, component_tag) and fed to numpy's
Philox generator. Gaussian variates come from numpy's ziggurat sampler
(``Generator.standard_normal``), uniforms from ``Generator.random``.
Replicate outputs are stored by index and reduced in index order with
numpy's pairwise summation, so aggregates do not depend on worker count,
chunk size or completion order.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
import hashlib
import json
import logging
import zlib

import numpy as np

from .exceptions import EnsembleFailure, UsageError

logger = logging.getLogger('clt_verification.engine')

_MASK64 = (1 << 64) - 1


def _splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def component_code(component_tag):
    """Stable integer code for a component tag ('main', 'wiener', 'poisson', ...)."""
    if isinstance(component_tag, int):
        return component_tag & _MASK64
    return zlib.crc32(str(component_tag).encode('utf-8'))


def stream_key(master_seed, path_index, component_tag='main'):
    key = _splitmix64(int(master_seed) & _MASK64)
    key = _splitmix64(key ^ (int(path_index) & _MASK64))
    return _splitmix64(key ^ component_code(component_tag))


def derive_stream(master_seed, path_index, component_tag='main'):
    """Reproducible, independent generator for one (seed, index, tag) triple"""
    return np.random.Generator(np.random.Philox(key=stream_key(master_seed, path_index, component_tag)))


@dataclass(frozen=True)
class ReplicateContext:
    master_seed: int
    index: int

    def stream(self, component_tag='main'):
        return derive_stream(self.master_seed, self.index, component_tag)


@dataclass(frozen=True)
class MCConfig:
    n_replicates: int
    master_seed: int = 0
    workers: int = 1
    chunk: int = 256

    def __post_init__(self):
        if self.n_replicates < 1:
            raise UsageError(f"n_replicates must be at least 1 (got {self.n_replicates})")
        if self.workers < 1:
            raise UsageError(f"workers must be at least 1 (got {self.workers})")
        if self.chunk < 1:
            raise UsageError(f"chunk must be at least 1 (got {self.chunk})")


@dataclass
class EnsembleResult:
    estimates: dict
    standard_errors: dict
    n: int
    manifest: dict
    samples: dict = field(default_factory=dict, repr=False)

    def as_row(self):
        row = {}
        for name, value in self.estimates.items():
            row[name] = value
            row[f"{name}_se"] = self.standard_errors[name]
        return row


def content_hash(payload):
    """sha256 over the canonical JSON of the run inputs"""
    canonical = json.dumps(payload, sort_keys=True, separators=(',', ':'), default=str)
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def build_manifest(inputs, config=None):
    manifest = {
        'inputs': inputs,
        'content_hash': content_hash(inputs),
        'created_at': datetime.now(timezone.utc).isoformat(),
    }
    if config is not None:
        manifest['config'] = {
            'n_replicates': config.n_replicates,
            'master_seed': config.master_seed,
            'workers': config.workers,
            'chunk': config.chunk,
        }
    return manifest


def _run_chunk(task, master_seed, indices):
    outputs = []
    failures = []
    for index in indices:
        try:
            outputs.append((index, dict(task(ReplicateContext(master_seed, index)))))
        except Exception as exc:
            failures.append((index, f"{type(exc).__name__}: {exc}"))
    return outputs, failures


def _as_output(value):
    return float(value) if np.ndim(value) == 0 else value


def run_ensemble(task, config, inputs=None):
    """
    Run ``task(ReplicateContext)`` for every replicate and aggregate.

    The task returns a mapping of named real outputs (scalars or arrays of
    a fixed shape; samples stack along a leading axis). Estimates are sample
    means, standard errors are sample standard deviations over sqrt(n)
    (zero for a single replicate).
    """
    indices = range(config.n_replicates)
    chunks = [indices[start:start + config.chunk] for start in range(0, config.n_replicates, config.chunk)]

    results = {}
    failures = []
    if config.workers == 1:
        for chunk in chunks:
            outputs, failed = _run_chunk(task, config.master_seed, chunk)
            results.update(outputs)
            failures.extend(failed)
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_run_chunk, task, config.master_seed, chunk) for chunk in chunks]
            for future in futures:
                outputs, failed = future.result()
                results.update(outputs)
                failures.extend(failed)

    if failures:
        failed_indices = sorted(index for index, _ in failures)
        for index, message in failures[:5]:
            logger.error(f"Replicate {index} failed: {message}")
        raise EnsembleFailure(
            f"{len(failed_indices)} of {config.n_replicates} replicates failed",
            failed_indices,
        )

    names = list(results[0].keys())
    samples = {
        name: np.array([results[index][name] for index in indices], dtype=float)
        for name in names
    }

    n = config.n_replicates
    estimates = {}
    standard_errors = {}
    for name, values in samples.items():
        mean = np.sum(values, axis=0) / n
        if n > 1:
            variance = np.sum((values - mean) ** 2, axis=0) / (n - 1)
            se = np.sqrt(variance / n)
        else:
            se = np.zeros_like(mean)
        estimates[name] = _as_output(mean)
        standard_errors[name] = _as_output(se)

    logger.info(f"Ensemble of {n} replicates finished (seed={config.master_seed}, workers={config.workers})")
    return EnsembleResult(
        estimates=estimates,
        standard_errors=standard_errors,
        n=n,
        manifest=build_manifest(inputs or {}, config),
        samples=samples,
    )
