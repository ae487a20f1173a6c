# clt_verification/management/commands/smalljump.py

from dataclasses import asdict

from django.conf import settings

from clt_verification.levy import (
    asmussen_rosinski_diagnostic, get_kernel, small_jump_clt_experiment,
)
from clt_verification.serializers import SmallJumpSerializer
from clt_verification.utils.commands import ExperimentCommand, add_measure_arguments
from clt_verification.utils.reports import write_csv

COLUMNS = [
    'epsilon', 'dW', 'se', 'n', 'third_moment_ratio', 'weighted_ratio', 'sample_variance',
    'floor_divisor', 'settled', 'noise_floor',
]


class Command(ExperimentCommand):
    help = 'Distance to normality of the standardized small-jump functional for a list of truncation levels'
    command_name = 'smalljump'
    serializer_class = SmallJumpSerializer

    def add_experiment_arguments(self, parser):
        add_measure_arguments(parser)
        parser.add_argument('--kernel', help='Time kernel: constant, exponential or power (default: constant)')
        parser.add_argument('--kernel-param', type=float, help='Kernel value, rate or exponent')
        parser.add_argument('--t', type=float, help='Time at which the functional is evaluated (default: 1)')
        parser.add_argument('--epsilons', help='Comma-separated truncation levels (default: 0.2,0.1,0.05)')
        parser.add_argument('--floor-divisor', type=int, help='Layered sampling stops at epsilon / divisor')
        parser.add_argument(
            '--max-floor-divisor', type=int, help='Deepest floor divisor tried while d_W is still moving',
        )

    def run_experiment(self, data, workers, out):
        measure = data['levy_measure']
        kernel = get_kernel(data['kernel'], data.get('kernel_param'))
        rows = small_jump_clt_experiment(
            measure, kernel, data['t'], data['epsilons'], data['n'], data['seed'], workers=workers,
            floor_divisor=data.get('floor_divisor', settings.SMLAB['LAYER_FLOOR_DIVISOR']),
            max_floor_divisor=data.get('max_floor_divisor', settings.SMLAB['LAYER_FLOOR_MAX_DIVISOR']),
        )
        epsilons, ratios, growing = asmussen_rosinski_diagnostic(measure, data['epsilons'])
        summary = {
            'epsilons': [float(e) for e in epsilons],
            'sigma_hat_over_epsilon': [float(r) for r in ratios],
            'sigma_hat_over_epsilon_growing': growing,
            'dW': [row.dW for row in rows],
            'settled': [row.settled for row in rows],
        }
        return summary, [write_csv([asdict(row) for row in rows], COLUMNS, out)]
