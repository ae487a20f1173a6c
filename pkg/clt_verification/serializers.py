# clt_verification/serializers.py

from rest_framework import serializers

from .exceptions import SteinLabError
from .gaussian_processes import FgnIncrement, FracOU, Tabulated
from .hermite import SUBORDINATORS
from .levy import KERNEL_NAMES, AtomsMeasure, TabulatedDensity, TruncatedPowerLaw


class FloatListField(serializers.Field):
    """Comma-separated floats from a flag or config line, or a list"""

    default_error_messages = {
        'invalid': 'Expected a comma-separated list of numbers.',
        'empty': 'At least one value is required.',
    }

    def to_internal_value(self, data):
        if isinstance(data, str):
            data = [item for item in data.replace(' ', '').split(',') if item]
        try:
            values = [float(item) for item in data]
        except (TypeError, ValueError):
            self.fail('invalid')
        if not values:
            self.fail('empty')
        return values

    def to_representation(self, value):
        return list(value)


class AtomsField(serializers.Field):
    """Atoms as 'x:w,x:w'"""

    default_error_messages = {
        'invalid': "Expected atoms as 'x:w,x:w' (e.g. '-1:0.5,1:0.5').",
    }

    def to_internal_value(self, data):
        if not isinstance(data, str):
            try:
                return [(float(x), float(w)) for x, w in data]
            except (TypeError, ValueError):
                self.fail('invalid')
        try:
            pairs = [item.split(':') for item in data.replace(' ', '').split(',') if item]
            return [(float(x), float(w)) for x, w in pairs]
        except ValueError:
            self.fail('invalid')

    def to_representation(self, value):
        return ','.join(f"{x!r}:{w!r}" for x, w in value)


def _positive(values, name):
    if any(value <= 0 for value in values):
        raise serializers.ValidationError(f"All {name} must be positive.")
    return values


def _load_table(cls, path, field_name):
    try:
        return cls.from_csv(path)
    except (OSError, ValueError, SteinLabError) as exc:
        raise serializers.ValidationError({field_name: f"Cannot load {path}: {exc}"})


# =============================================
# SHARED PARAMETER GROUPS
# =============================================

class ExperimentSerializer(serializers.Serializer):
    seed = serializers.IntegerField(min_value=0, default=0)
    n = serializers.IntegerField(min_value=2, default=1000)
    workers = serializers.IntegerField(min_value=1, required=False)


class CovarianceModelSerializer(serializers.Serializer):
    """Covariance model parameters; builds the model in validate()"""
    model = serializers.ChoiceField(choices=['fgn', 'fracou', 'tabulated'], default='fgn')
    hurst = serializers.FloatField(required=False)
    lam = serializers.FloatField(required=False)
    sigma_tilde = serializers.FloatField(required=False)
    table = serializers.CharField(required=False)

    def validate_hurst(self, value):
        if not 0 < value < 1:
            raise serializers.ValidationError("Hurst parameter must lie in (0, 1).")
        return value

    def validate(self, attrs):
        attrs = super().validate(attrs)
        kind = attrs['model']
        if kind in ('fgn', 'fracou') and 'hurst' not in attrs:
            raise serializers.ValidationError({'hurst': f"Required for model '{kind}'."})
        if kind == 'fgn':
            attrs['covariance'] = FgnIncrement(attrs['hurst'])
        elif kind == 'fracou':
            lam = attrs.get('lam')
            if lam is None or lam <= 0:
                raise serializers.ValidationError({'lam': "A positive lambda is required for 'fracou'."})
            sigma_tilde = attrs.get('sigma_tilde')
            if sigma_tilde is None:
                attrs['covariance'] = FracOU.unit_variance(attrs['hurst'], lam)
            elif sigma_tilde <= 0:
                raise serializers.ValidationError({'sigma_tilde': "Must be positive."})
            else:
                attrs['covariance'] = FracOU(attrs['hurst'], lam, sigma_tilde)
        else:
            if not attrs.get('table'):
                raise serializers.ValidationError({'table': "A CSV path is required for 'tabulated'."})
            attrs['covariance'] = _load_table(Tabulated, attrs['table'], 'table')
        return attrs


class MeasureSerializer(serializers.Serializer):
    """Levy measure parameters; builds the measure in validate()"""
    measure = serializers.ChoiceField(choices=['atoms', 'powerlaw', 'tabulated'], default='powerlaw')
    atoms = AtomsField(required=False)
    delta = serializers.FloatField(required=False, default=0.0)
    a = serializers.FloatField(required=False, default=1.0)
    b = serializers.FloatField(required=False, default=1.0)
    density = serializers.CharField(required=False)

    def validate_delta(self, value):
        if not -1 < value < 1:
            raise serializers.ValidationError("delta must lie in (-1, 1).")
        return value

    def validate(self, attrs):
        attrs = super().validate(attrs)
        kind = attrs['measure']
        if kind == 'atoms':
            atoms = attrs.get('atoms') or [(-1.0, 0.5), (1.0, 0.5)]
            attrs['levy_measure'] = AtomsMeasure(tuple(atoms))
        elif kind == 'powerlaw':
            if attrs['a'] <= 0 or attrs['b'] <= 0:
                raise serializers.ValidationError("Truncation points a and b must be positive.")
            attrs['levy_measure'] = TruncatedPowerLaw(attrs['delta'], attrs['a'], attrs['b'])
        else:
            if not attrs.get('density'):
                raise serializers.ValidationError({'density': "A CSV path is required for 'tabulated'."})
            attrs['levy_measure'] = _load_table(TabulatedDensity, attrs['density'], 'density')
        return attrs


# =============================================
# COMMANDS
# =============================================

class CovfitSerializer(CovarianceModelSerializer):
    tmax = serializers.FloatField(min_value=16, default=10000.0)


class CltSweepSerializer(ExperimentSerializer, CovarianceModelSerializer):
    subordinator = serializers.ChoiceField(choices=sorted(SUBORDINATORS), default='identity')
    T_list = FloatListField(default=[64.0, 128.0, 256.0, 512.0])
    dt = serializers.FloatField(required=False)
    tmax = serializers.FloatField(min_value=16, default=10000.0)

    def validate_T_list(self, value):
        return _positive(value, 'horizons')

    def validate_dt(self, value):
        if not 0 < value <= 1:
            raise serializers.ValidationError("dt must lie in (0, 1].")
        return value


class SmallJumpSerializer(ExperimentSerializer, MeasureSerializer):
    kernel = serializers.ChoiceField(choices=list(KERNEL_NAMES), default='constant')
    kernel_param = serializers.FloatField(required=False)
    t = serializers.FloatField(default=1.0)
    epsilons = FloatListField(default=[0.2, 0.1, 0.05])
    floor_divisor = serializers.IntegerField(min_value=2, required=False)
    max_floor_divisor = serializers.IntegerField(min_value=2, required=False)

    def validate_t(self, value):
        if value <= 0:
            raise serializers.ValidationError("t must be positive.")
        return value

    def validate_epsilons(self, value):
        return _positive(value, 'epsilons')

    def validate(self, attrs):
        attrs = super().validate(attrs)
        if attrs['kernel'] != 'constant' and attrs.get('kernel_param') is None:
            raise serializers.ValidationError({'kernel_param': f"Required for kernel '{attrs['kernel']}'."})
        floor, deepest = attrs.get('floor_divisor'), attrs.get('max_floor_divisor')
        if floor is not None and deepest is not None and deepest < floor:
            raise serializers.ValidationError({'max_floor_divisor': "Must be at least floor_divisor."})
        return attrs


class FlpSerializer(ExperimentSerializer, MeasureSerializer):
    hurst = serializers.FloatField()
    epsilon = serializers.FloatField(default=0.1)
    t_end = serializers.FloatField(default=2.0)
    points = serializers.IntegerField(min_value=3, max_value=4097, default=129)
    format = serializers.ChoiceField(choices=['csv', 'binary'], default='csv')

    def validate_hurst(self, value):
        if not 0 < value < 1:
            raise serializers.ValidationError("Hurst parameter must lie in (0, 1).")
        return value

    def validate_epsilon(self, value):
        return _positive([value], 'epsilon values')[0]

    def validate_t_end(self, value):
        return _positive([value], 'horizons')[0]


class OuProductSerializer(ExperimentSerializer, MeasureSerializer):
    measure = serializers.ChoiceField(choices=['atoms', 'powerlaw', 'tabulated'], default='atoms')
    lam = serializers.FloatField(default=1.0)
    T_list = FloatListField(default=[32.0, 64.0, 128.0, 256.0, 512.0, 1024.0])
    dt = serializers.FloatField(required=False)

    def validate_lam(self, value):
        return _positive([value], 'rates')[0]

    def validate_T_list(self, value):
        value = _positive(value, 'horizons')
        if len(value) < 4:
            raise serializers.ValidationError("At least 4 horizons are required.")
        ratios = [b / a for a, b in zip(value, value[1:])]
        if any(ratio <= 1 for ratio in ratios) or max(ratios) - min(ratios) > 1e-9 * ratios[0]:
            raise serializers.ValidationError("Horizons must form an increasing geometric sequence.")
        return value

    def validate_dt(self, value):
        return _positive([value], 'steps')[0]
