# clt_verification/utils/commands.py

import json
import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from django.db import DatabaseError

from ..exceptions import SteinLabError
from ..mc_engine import build_manifest, content_hash
from ..models import ExperimentRun
from .config import merge_parameters, read_config_file
from .reports import to_json, write_manifest

logger = logging.getLogger('clt_verification.commands')

# validated objects built from the parameters, not parameters themselves
BUILT_KEYS = ('covariance', 'levy_measure')
RUNTIME_KEYS = ('workers',)


class ExperimentCommand(BaseCommand):
    """
    Shared surface of the experiment commands: --seed, --n, --workers,
    --out and --config, DRF validation of the merged parameters, the
    manifest next to the output and the run ledger entry.

    Subclasses set ``command_name``, ``serializer_class`` and
    ``output_suffix`` and implement ``run_experiment``.
    """
    command_name = None
    serializer_class = None
    output_suffix = '.csv'
    experiment_flags = True

    def add_arguments(self, parser):
        if self.experiment_flags:
            parser.add_argument('--seed', type=int, help='Master seed (default: 0)')
            parser.add_argument('--n', type=int, help='Monte Carlo replicates (default: 1000)')
            parser.add_argument('--workers', type=int, help='Worker processes (default: SML_WORKERS)')
        parser.add_argument('--out', help='Output path (default: SML_OUTPUT_DIR/<command><suffix>)')
        parser.add_argument('--config', help='Flat key=value file; flags take precedence')
        self.add_experiment_arguments(parser)

    def add_experiment_arguments(self, parser):
        pass

    def run_experiment(self, data, workers, out):
        """Returns (summary mapping, list of written paths); the first path carries the manifest"""
        raise NotImplementedError

    def handle(self, *args, **options):
        keys = list(self.serializer_class().fields) + ['out']
        try:
            file_values = read_config_file(options['config']) if options.get('config') else {}
            raw = merge_parameters(options, file_values, keys)
            serializer = self.serializer_class(data=raw)
            valid = serializer.is_valid()
        except SteinLabError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code)
        if not valid:
            raise CommandError(f"Invalid parameters: {json.dumps(serializer.errors, default=str)}", returncode=1)

        data = serializer.validated_data
        workers = data.get('workers') or settings.SML_WORKERS
        out = Path(raw.get('out') or settings.SML_OUTPUT_DIR / f"{self.command_name}{self.output_suffix}")
        inputs = self.manifest_inputs(data)

        logger.info(f"{self.command_name} started (seed={data.get('seed')}, n={data.get('n')}, workers={workers})")
        try:
            summary, outputs = self.run_experiment(data, workers, out)
        except SteinLabError as exc:
            logger.warning(f"{self.command_name} failed with exit code {exc.exit_code}: {exc}")
            self.record_run(inputs, data, exc.exit_code, [], {'error': f"{type(exc).__name__}: {exc}"})
            raise CommandError(f"{type(exc).__name__}: {exc}", returncode=exc.exit_code)

        manifest = build_manifest(inputs)
        manifest['command'] = self.command_name
        manifest['outputs'] = [str(path) for path in outputs]
        manifest['runtime'] = {'workers': workers}
        if outputs:
            write_manifest(outputs[0], manifest)
        self.record_run(inputs, data, 0, outputs, summary, manifest['content_hash'])
        logger.info(f"{self.command_name} finished: {', '.join(manifest['outputs']) or 'no files'}")
        self.stdout.write(to_json(summary))

    def manifest_inputs(self, data):
        inputs = {'command': self.command_name}
        for key, value in data.items():
            if key in RUNTIME_KEYS:
                continue
            inputs[key] = repr(value) if key in BUILT_KEYS else value
        return inputs

    def record_run(self, inputs, data, exit_code, outputs, summary, digest=None):
        try:
            ExperimentRun.objects.create(
                command=self.command_name,
                parameters=json.loads(to_json(inputs)),
                content_hash=digest or content_hash(inputs),
                master_seed=data.get('seed', 0),
                n=data.get('n'),
                exit_code=exit_code,
                output_paths=[str(path) for path in outputs],
                summary=json.loads(to_json(summary)),
            )
        except DatabaseError as exc:
            logger.warning(f"Could not record {self.command_name} run in the ledger: {exc}")


def add_covariance_arguments(parser):
    parser.add_argument('--model', choices=['fgn', 'fracou', 'tabulated'], help='Covariance model (default: fgn)')
    parser.add_argument('--hurst', type=float, help='Hurst parameter H in (0, 1)')
    parser.add_argument('--lam', type=float, help='Mean-reversion rate of the fractional OU field')
    parser.add_argument(
        '--sigma-tilde', type=float,
        help='Noise scale of the fractional OU field (default: scaled to unit variance)'
    )
    parser.add_argument('--table', help='CSV of (lag, covariance) for the tabulated model')


def add_measure_arguments(parser):
    parser.add_argument('--measure', choices=['atoms', 'powerlaw', 'tabulated'], help='Levy measure kind')
    parser.add_argument('--atoms', help="Atoms as 'x:w,x:w' (default: -1:0.5,1:0.5)")
    parser.add_argument('--delta', type=float, help='Power-law index delta in (-1, 1) (default: 0)')
    parser.add_argument('--a', type=float, help='Left truncation point of the power law (default: 1)')
    parser.add_argument('--b', type=float, help='Right truncation point of the power law (default: 1)')
    parser.add_argument('--density', help='CSV of (x, density) for the tabulated measure')
