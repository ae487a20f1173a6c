# clt_verification/management/commands/flp.py

from pathlib import Path

from clt_verification.flp import (
    cached_grid_kernel, covariance_check, simulate_flp_approx, write_paths_binary, write_paths_csv,
)
from clt_verification.numerics import Grid
from clt_verification.serializers import FlpSerializer
from clt_verification.utils.commands import ExperimentCommand, add_measure_arguments
from clt_verification.utils.reports import write_json


class Command(ExperimentCommand):
    help = 'Simulate the fractional Levy process approximation and check its covariance'
    command_name = 'flp'
    serializer_class = FlpSerializer

    def add_experiment_arguments(self, parser):
        add_measure_arguments(parser)
        parser.add_argument('--hurst', type=float, help='Hurst parameter H in (0, 1)')
        parser.add_argument('--epsilon', type=float, help='Jump truncation level (default: 0.1)')
        parser.add_argument('--t-end', type=float, help='Grid end point (default: 2)')
        parser.add_argument('--points', type=int, help='Grid points including 0 (default: 129)')
        parser.add_argument('--format', choices=['csv', 'binary'], help='Path file format (default: csv)')

    def run_experiment(self, data, workers, out):
        if data['format'] == 'binary' and out.suffix == '.csv':
            out = out.with_suffix('.flp')
        grid = Grid(0.0, data['t_end'], data['points'])
        kernel = cached_grid_kernel(float(data['hurst']), grid)
        ensemble = simulate_flp_approx(
            data['hurst'], data['levy_measure'], data['epsilon'], grid, data['n'], data['seed'],
            workers=workers, kernel=kernel,
        )
        if data['format'] == 'binary':
            path_file = write_paths_binary(ensemble, out)
        else:
            path_file = write_paths_csv(ensemble, out)
        check = covariance_check(ensemble, data['levy_measure'], kernel)
        check['third_moment_ratio'] = ensemble.third_moment_ratio
        check['sigma_hat'] = ensemble.sigma_hat
        check_file = write_json(check, Path(str(out) + '.check.json'))
        return check, [path_file, check_file]
