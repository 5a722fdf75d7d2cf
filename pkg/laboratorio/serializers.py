from django.core.exceptions import ValidationError as DjangoValidationError
from rest_framework import serializers

from sistemi.modello import ModelParams, State
from sistemi.proprieta import ExitCase, Verdict
from sistemi.schemi import PHI_OPTIONS, SchemeId, StepSize
from sistemi.stabilita import Classification, SystemKind

from .scenari import SCHEMA_ID, Analysis, Scenario


def _errori_django(e):
    """Converte una ValidationError di Django nel formato di errore di DRF."""
    if hasattr(e, 'error_dict'):
        return e.message_dict
    return {'non_field_errors': e.messages}


# Coppia [x, y] usata per le condizioni iniziali aggiuntive
class CoppiaField(serializers.Field):
    default_error_messages = {
        'invalid': 'Attesa una coppia di numeri [x, y].',
    }

    def to_representation(self, value):
        return [float(value.x), float(value.y)]

    def to_internal_value(self, data):
        if not isinstance(data, (list, tuple)) or len(data) != 2:
            self.fail('invalid')
        try:
            return float(data[0]), float(data[1])
        except (TypeError, ValueError):
            self.fail('invalid')


class ComplexField(serializers.Field):
    default_error_messages = {
        'invalid': 'Atteso un oggetto {"re": ..., "im": ...}.',
    }

    def to_representation(self, value):
        return {'re': float(value.real), 'im': float(value.imag)}

    def to_internal_value(self, data):
        try:
            return complex(float(data['re']), float(data['im']))
        except (KeyError, TypeError, ValueError):
            self.fail('invalid')


class ScenarioSerializer(serializers.Serializer):
    """Configurazione di uno scenario, in forma piatta.

    In ingresso valida i valori (da CLI o da JSON) costruendo i tipi del dominio; in uscita e' l'eco
    dello scenario nei report.
    """

    name = serializers.SlugField(max_length=100)
    description = serializers.CharField(required=False, allow_blank=True, default='')
    scheme = serializers.ChoiceField(choices=SchemeId.choices)
    alpha = serializers.FloatField(source='params.alpha')
    beta = serializers.FloatField(source='params.beta')
    gamma = serializers.FloatField(source='params.gamma')
    delta = serializers.FloatField(source='params.delta')
    h = serializers.FloatField(source='h.h')
    phi = serializers.ChoiceField(source='phi.name', choices=sorted(PHI_OPTIONS), default='identity')
    x0 = serializers.FloatField(source='start.x')
    y0 = serializers.FloatField(source='start.y')
    steps = serializers.IntegerField(source='n_steps', min_value=1)
    analyses = serializers.ListField(
        child=serializers.ChoiceField(choices=Analysis.choices), required=False, default=list,
    )
    extra_starts = serializers.ListField(child=CoppiaField(), required=False, default=list)
    overlay_window = serializers.FloatField(required=False, allow_null=True, default=None)
    overlay_ref_h = serializers.FloatField(required=False, allow_null=True, default=None)

    def validate(self, attrs):
        errori = {}
        parti = {}
        costruttori = {
            'params': lambda: ModelParams(**attrs['params']),
            'h': lambda: StepSize(attrs['h']['h']),
            'start': lambda: State(attrs['start']['x'], attrs['start']['y']),
            'extra_starts': lambda: tuple(State(x, y) for x, y in attrs.get('extra_starts', [])),
        }
        for nome, costruttore in costruttori.items():
            try:
                parti[nome] = costruttore()
            except DjangoValidationError as e:
                errori.update(_errori_django(e))
        if errori:
            raise serializers.ValidationError(errori)

        try:
            attrs['istanza'] = Scenario(
                name=attrs['name'],
                description=attrs.get('description', ''),
                params=parti['params'],
                scheme=attrs['scheme'],
                h=parti['h'],
                phi=PHI_OPTIONS[attrs.get('phi', {}).get('name', 'identity')],
                start=parti['start'],
                n_steps=attrs['n_steps'],
                analyses=tuple(attrs.get('analyses', ())),
                extra_starts=parti['extra_starts'],
                overlay_window=attrs.get('overlay_window'),
                overlay_ref_h=attrs.get('overlay_ref_h'),
            )
        except DjangoValidationError as e:
            raise serializers.ValidationError(_errori_django(e))
        return attrs

    def create(self, validated_data):
        return validated_data['istanza']


class StateSerializer(serializers.Serializer):
    x = serializers.FloatField()
    y = serializers.FloatField()


class MatrixSerializer(serializers.Serializer):
    a = serializers.FloatField()
    b = serializers.FloatField()
    c = serializers.FloatField()
    d = serializers.FloatField()


class EigenpairSerializer(serializers.Serializer):
    lambda1 = ComplexField()
    lambda2 = ComplexField()
    moduli = serializers.ListField(child=serializers.FloatField(), read_only=True)


class StabilityReportSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=SystemKind.choices)
    point = StateSerializer()
    jacobian = MatrixSerializer()
    eigen = EigenpairSerializer()
    classification = serializers.ChoiceField(choices=Classification.choices)
    notes = serializers.ListField(child=serializers.CharField(), required=False, default=list)


class DirectionSummarySerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=SystemKind.choices)
    checked = serializers.IntegerField(min_value=0)
    conforming = serializers.IntegerField(min_value=0)
    violations = serializers.IntegerField(read_only=True)
    skipped = serializers.IntegerField(min_value=0)


class PositivityReportSerializer(serializers.Serializer):
    first_negative_step = serializers.IntegerField(allow_null=True, min_value=0)
    negative_variable = serializers.ChoiceField(choices=['x', 'y'], allow_null=True)
    recovered_positive_step = serializers.IntegerField(allow_null=True, min_value=0)
    exit_case = serializers.ChoiceField(choices=ExitCase.choices, allow_null=True)


class ClosureMetricsSerializer(serializers.Serializer):
    crossings = serializers.ListField(child=serializers.FloatField())
    crossing_times = serializers.ListField(child=serializers.FloatField())
    drift_per_period = serializers.ListField(child=serializers.FloatField())
    v_at_crossings = serializers.ListField(child=serializers.FloatField())
    v_drift = serializers.FloatField(allow_null=True)
    verdict = serializers.ChoiceField(choices=Verdict.choices)
    counterclockwise = serializers.BooleanField(allow_null=True)


class OverlayResultSerializer(serializers.Serializer):
    sup_rel_error = serializers.FloatField(min_value=0)
    sup_rel_error_x = serializers.FloatField(min_value=0)
    sup_rel_error_y = serializers.FloatField(min_value=0)
    tolerance = serializers.FloatField(min_value=0)
    within_tolerance = serializers.BooleanField(read_only=True)
    compared_points = serializers.SerializerMethodField()
    window = serializers.SerializerMethodField()

    def get_compared_points(self, obj):
        return len(obj.times)

    def get_window(self, obj):
        if not len(obj.times):
            return None
        return [float(obj.times[0]), float(obj.times[-1])]


class RunReportSerializer(serializers.Serializer):
    """Schema versionato del report JSON di una corsa.

    Le chiavi delle analisi compaiono solo se richieste dallo scenario. Rileggere un report con
    questo serializer (data=...) equivale a validarlo contro lo schema.
    """

    schema = serializers.CharField()
    tool_version = serializers.CharField()
    scenario = ScenarioSerializer()
    trajectory_paths = serializers.ListField(child=serializers.CharField(), min_length=1)
    phase_svg = serializers.CharField()
    timeseries_svg = serializers.CharField()
    truncations = serializers.ListField(child=serializers.IntegerField(allow_null=True, min_value=1))
    wall_clock_seconds = serializers.FloatField(min_value=0)
    stability = StabilityReportSerializer(many=True, required=False)
    direction = DirectionSummarySerializer(many=True, required=False)
    positivity = PositivityReportSerializer(many=True, required=False)
    closure = ClosureMetricsSerializer(many=True, required=False)
    overlay = OverlayResultSerializer(required=False)

    def to_representation(self, instance):
        data = super().to_representation(instance)
        for analisi in Analysis:
            if analisi not in instance.scenario.analyses:
                data.pop(analisi.value, None)
        return data

    def validate_schema(self, value):
        if value != SCHEMA_ID:
            raise serializers.ValidationError(f'Schema non supportato: {value!r} (atteso {SCHEMA_ID!r}).')
        return value

    def validate(self, attrs):
        scenario = attrs['scenario']['istanza']
        presenti = {a for a in Analysis.values if a in attrs}
        richieste = {str(a) for a in scenario.analyses}
        if presenti != richieste:
            raise serializers.ValidationError(
                f'Analisi presenti {sorted(presenti)} diverse da quelle richieste {sorted(richieste)}.'
            )
        if len(attrs['trajectory_paths']) != len(scenario.starts):
            raise serializers.ValidationError('Serve un file di traiettoria per ogni condizione iniziale.')
        return attrs
