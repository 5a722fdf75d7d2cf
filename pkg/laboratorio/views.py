from rest_framework import viewsets #ViewSet senza modello: i preset vivono in memoria
from rest_framework.decorators import action
from rest_framework.exceptions import NotFound
from rest_framework.permissions import AllowAny
from rest_framework.response import Response

from .esecuzione import stability_for
from .exceptions import ErroreConfigurazione
from .scenari import get_preset, list_presets
from .serializers import ScenarioSerializer, StabilityReportSerializer


class PresetViewSet(viewsets.ViewSet):
    """
    Endpoint generati (sola lettura):
    - GET /api/presets/                  → Lista dei preset delle figure
    - GET /api/presets/{nome}/           → Dettaglio preset con la stabilita' dei punti fissi
    - GET /api/presets/{nome}/stabilita/ → Solo i rapporti di stabilita'
    """

    permission_classes = [AllowAny] #Lettura pubblica, nessuna scrittura
    lookup_field = 'name'
    lookup_value_regex = '[-a-zA-Z0-9_]+'

    def _preset(self, name):
        try:
            return get_preset(name)
        except ErroreConfigurazione as e:
            raise NotFound(str(e))

    def list(self, request):
        presets = list_presets()
        serializer = ScenarioSerializer(presets, many=True)
        return Response({
            'count': len(presets),
            'results': serializer.data,
        })

    def retrieve(self, request, name=None):
        scenario = self._preset(name)
        return Response({
            'scenario': ScenarioSerializer(scenario).data,
            'stability': StabilityReportSerializer(stability_for(scenario), many=True).data,
        })

    @action(detail=True, methods=['get'])
    def stabilita(self, request, name=None):
        scenario = self._preset(name)
        rapporti = stability_for(scenario)
        return Response({
            'count': len(rapporti),
            'results': StabilityReportSerializer(rapporti, many=True).data,
        })
