# clt_verification/management/commands/covfit.py

from clt_verification.serializers import CovfitSerializer
from clt_verification.subordinated_clt import (
    fit_condition_star, predicted_rate_exponent, rate_summary_exponent,
)
from clt_verification.utils.commands import ExperimentCommand, add_covariance_arguments
from clt_verification.utils.reports import write_json


class Command(ExperimentCommand):
    help = 'Fit the covariance tail to M * T^-alpha and report the decay regime (exit 2 if it cannot be verified)'
    command_name = 'covfit'
    serializer_class = CovfitSerializer
    output_suffix = '.json'
    experiment_flags = False

    def add_experiment_arguments(self, parser):
        add_covariance_arguments(parser)
        parser.add_argument('--tmax', type=float, help='Largest lag of the tail fit (default: 10000)')

    def run_experiment(self, data, workers, out):
        model = data['covariance']
        decay = fit_condition_star(model, data['tmax'])
        report = {
            'model': data['model'],
            'covariance': repr(model),
            'tmax': data['tmax'],
            'c0': float(model.c0),
            'limit_ratio': model.limit_ratio,
            'predicted_rate_exponent': predicted_rate_exponent(decay),
            **decay.to_dict(),
        }
        if hasattr(model, 'H'):
            report['rate_summary_exponent'] = rate_summary_exponent(model.H)
        return report, [write_json(report, out)]
