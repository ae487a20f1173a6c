# clt_verification/management/commands/clt_sweep.py

from dataclasses import asdict

from django.conf import settings

from clt_verification.hermite import get_subordinator, hermite_coefficients
from clt_verification.serializers import CltSweepSerializer
from clt_verification.subordinated_clt import clt_sweep, fit_condition_star, fit_dW_rate
from clt_verification.utils.commands import ExperimentCommand, add_covariance_arguments
from clt_verification.utils.reports import write_csv

COLUMNS = [
    'T', 'sigma_sq_limit', 'empirical_variance', 'empirical_dW', 'predicted_rate',
    'bound_term_1', 'bound_term_2', 'n', 'seed',
]


class Command(ExperimentCommand):
    help = 'Simulate F_T over a list of horizons and compare with the limiting variance and predicted rate'
    command_name = 'clt_sweep'
    serializer_class = CltSweepSerializer

    def add_experiment_arguments(self, parser):
        add_covariance_arguments(parser)
        parser.add_argument('--subordinator', help='Named f: identity, square, cube, hermite3, cosine')
        parser.add_argument('--T-list', dest='T_list', help='Comma-separated horizons (default: 64,128,256,512)')
        parser.add_argument('--dt', type=float, help='Path grid step in (0, 1]')
        parser.add_argument('--tmax', type=float, help='Largest lag of the covariance tail fit (default: 10000)')

    def run_experiment(self, data, workers, out):
        options = settings.SMLAB
        model = data['covariance']
        f = get_subordinator(data['subordinator'])
        decay = fit_condition_star(model, data['tmax'])
        expansion = hermite_coefficients(
            f, Q=options['HERMITE_ORDER'], n_nodes=options['GAUSS_HERMITE_NODES'],
            tail_tolerance=options['HERMITE_TAIL_TOLERANCE'],
        )
        reports = clt_sweep(
            model, f, decay, data['T_list'], data['n'], data['seed'],
            dt=data.get('dt', options['FIELD_DT']), workers=workers, expansion=expansion,
        )
        rows = [asdict(report) for report in reports]
        summary = {
            'regime': decay.regime,
            'alpha': decay.alpha,
            'sigma_sq_limit': reports[0].sigma_sq_limit,
            'predicted_rate_exponent': reports[0].predicted_rate_exponent,
        }
        if len(reports) >= 3:
            fit, slope_se = fit_dW_rate(reports)
            summary['fitted_dW_slope'] = fit.slope
            summary['fitted_dW_slope_se'] = slope_se
        return summary, [write_csv(rows, COLUMNS, out)]
