# clt_verification/management/commands/ou_product.py

from dataclasses import asdict
from pathlib import Path

from django.conf import settings

from clt_verification.serializers import OuProductSerializer
from clt_verification.utils.commands import ExperimentCommand, add_measure_arguments
from clt_verification.utils.reports import write_csv, write_json
from clt_verification.wiener_poisson import bound_terms, rate_experiment

COLUMNS = [
    'T', 'dW', 'se', 'var_analytic', 'var_empirical',
    'term_dF4', 'term_cube', 'term_contraction', 'term_d2sq',
    'noise_floor', 'dW_conditional', 'se_conditional', 'var_conditional',
]


class Command(ExperimentCommand):
    help = 'Rate experiment for the product of a Wiener and a Poisson Ornstein-Uhlenbeck process'
    command_name = 'ou_product'
    serializer_class = OuProductSerializer

    def add_experiment_arguments(self, parser):
        add_measure_arguments(parser)
        parser.add_argument('--lam', type=float, help='OU rate lambda (default: 1)')
        parser.add_argument('--T-list', dest='T_list', help='Geometric horizons (default: 32,64,...,1024)')
        parser.add_argument('--dt', type=float, help='Time step of the integral of Y Z (default: 0.1)')

    def run_experiment(self, data, workers, out):
        lam = data['lam']
        measure = data['levy_measure']
        experiment = rate_experiment(
            lam, measure, data['T_list'], data['n'], data['seed'],
            dt=data.get('dt', settings.SMLAB['OU_PRODUCT_DT']), workers=workers,
        )
        bounds = {
            'lam': lam,
            'reports': [{'T': T, **asdict(bound_terms(lam, measure, T))} for T in data['T_list']],
            'fitted_slope': experiment.fit.slope,
            'fitted_slope_se': experiment.slope_se,
            'fitted_r_squared': experiment.fit.r_squared,
            'predicted_rate_exponent': experiment.predicted_rate_exponent,
            'conjectured_rate_exponent': experiment.conjectured_rate_exponent,
        }
        csv_file = write_csv([asdict(row) for row in experiment.rows], COLUMNS, out)
        bounds_file = write_json(bounds, Path(str(out) + '.bounds.json'))
        return bounds, [csv_file, bounds_file]
