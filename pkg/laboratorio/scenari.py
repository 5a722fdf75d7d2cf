import math
from dataclasses import dataclass, field
from typing import Optional

from django.core.exceptions import ValidationError
from django.core.validators import validate_slug
from django.db import models

from sistemi.modello import ModelParams, State, fixed_points
from sistemi.schemi import PHI_DEFAULT, PhiFunction, SchemeId, StepSize

from .exceptions import ErroreConfigurazione

SCHEMA_ID = 'lotka-lab/run-report/1'

# Passo del riferimento RK4 rispetto al passo dello scenario (se non indicato)
RAPPORTO_RIFERIMENTO = 100


class Analysis(models.TextChoices):
    STABILITY = 'stability', 'Stabilita\' dei punti fissi'
    DIRECTION = 'direction', 'Direzione del moto per regioni'
    POSITIVITY = 'positivity', 'Positivita\' delle soluzioni'
    CLOSURE = 'closure', 'Chiusura delle orbite'
    OVERLAY = 'overlay', 'Confronto con il riferimento RK4'


ORDINE_ANALISI = tuple(Analysis)


@dataclass(frozen=True)
class Scenario:
    """Configurazione completa di una corsa: modello, schema, passo, partenze e analisi richieste."""

    name: str
    params: ModelParams
    scheme: SchemeId
    h: StepSize
    start: State
    n_steps: int
    phi: PhiFunction = PHI_DEFAULT
    analyses: tuple = ()
    extra_starts: tuple = ()
    overlay_window: Optional[float] = None
    overlay_ref_h: Optional[float] = None
    description: str = ''

    def __post_init__(self):
        errori = {}

        try:
            validate_slug(self.name)
        except ValidationError:
            errori['name'] = f'Nome scenario non valido: {self.name!r} (lettere, cifre, - e _).'

        try:
            object.__setattr__(self, 'scheme', SchemeId(self.scheme))
        except ValueError:
            errori['scheme'] = f'Schema sconosciuto: {self.scheme!r}.'

        object.__setattr__(self, 'h', StepSize.coerce(self.h))

        if isinstance(self.n_steps, bool) or not isinstance(self.n_steps, int) or self.n_steps < 1:
            errori['n_steps'] = f'Il numero di passi deve essere un intero >= 1 (ricevuto {self.n_steps!r}).'

        sconosciute = [a for a in self.analyses if a not in Analysis.values]
        if sconosciute:
            errori['analyses'] = f'Analisi sconosciute: {", ".join(map(str, sconosciute))}.'
        else:
            richieste = {str(a) for a in self.analyses}
            object.__setattr__(self, 'analyses', tuple(a for a in ORDINE_ANALISI if a.value in richieste))

        object.__setattr__(self, 'extra_starts', tuple(self.extra_starts))

        if self.scheme == SchemeId.MICKENS and any(s.x < 0 or s.y < 0 for s in self.starts):
            errori['start'] = 'Lo schema di Mickens richiede condizioni iniziali non negative.'
        if Analysis.CLOSURE in self.analyses:
            centro = fixed_points(self.params).coexistence
            for s in self.starts:
                if not s.is_positive():
                    errori['start'] = f'La chiusura richiede partenze nel quadrante aperto, ricevuto ({s.x}, {s.y}).'
                elif math.hypot(s.x - centro.x, s.y - centro.y) <= 1e-6:
                    errori['start'] = 'La chiusura non e\' definita partendo dal punto di coesistenza.'

        for nome in ('overlay_window', 'overlay_ref_h'):
            valore = getattr(self, nome)
            if valore is None:
                continue
            if isinstance(valore, bool) or not isinstance(valore, (int, float)) or not math.isfinite(valore) or valore <= 0:
                errori[nome] = f'{nome} deve essere un numero positivo e finito (ricevuto {valore!r}).'
        if 'overlay_ref_h' not in errori and self.overlay_ref_h is not None and self.overlay_ref_h > self.h.h:
            errori['overlay_ref_h'] = 'Il passo del riferimento non puo\' superare quello dello scenario.'

        if errori:
            raise ValidationError(errori)

    @property
    def starts(self):
        return (self.start,) + self.extra_starts

    @property
    def t_end(self):
        return self.n_steps * self.h.h

    @property
    def reference_h(self):
        return float(self.overlay_ref_h) if self.overlay_ref_h is not None else self.h.h / RAPPORTO_RIFERIMENTO

    #Passi del riferimento RK4 necessari a coprire la finestra di confronto
    @property
    def reference_steps(self):
        finestra = min(self.overlay_window or self.t_end, self.t_end)
        return max(1, math.ceil(finestra / self.reference_h - 1e-9))

    def requires(self, analysis):
        return analysis in self.analyses


@dataclass(frozen=True)
class RunReport:
    scenario: Scenario
    tool_version: str
    trajectory_paths: list
    phase_svg: str
    timeseries_svg: str
    truncations: list
    wall_clock_seconds: float
    stability: Optional[list] = None
    direction: Optional[list] = None
    positivity: Optional[list] = None
    closure: Optional[list] = None
    overlay: Optional[object] = None
    report_path: Optional[str] = field(default=None, compare=False)

    @property
    def schema(self):
        return SCHEMA_ID

    @property
    def diverged(self):
        return any(t is not None for t in self.truncations)


# Parametri comuni a tutte le figure riprodotte
PARAMETRI_FIGURE = ModelParams(alpha=1.0, beta=0.1, gamma=0.075, delta=0.75)


def _preset(name, scheme, h, n_steps, analyses, description, start=(5.0, 5.0), extra_starts=(), **extra):
    return Scenario(
        name=name,
        params=PARAMETRI_FIGURE,
        scheme=scheme,
        h=StepSize(h),
        start=State(*start),
        n_steps=n_steps,
        analyses=analyses,
        extra_starts=tuple(State(*s) for s in extra_starts),
        description=description,
        **extra,
    )


PRESETS = {sc.name: sc for sc in (
    _preset(
        'fig1-regions', SchemeId.RK4, 0.01, 3000,
        (Analysis.DIRECTION, Analysis.STABILITY),
        'Regioni I-IV del quadrante positivo e direzione del moto lungo un\'orbita continua.',
    ),
    _preset(
        'fig2-phase-portrait', SchemeId.RK4, 0.01, 4000,
        (Analysis.STABILITY, Analysis.DIRECTION, Analysis.CLOSURE),
        'Ritratto di fase del sistema continuo: orbite chiuse attorno al punto di coesistenza.',
        extra_starts=((7.0, 7.0), (3.0, 8.0), (14.0, 6.0)),
    ),
    _preset(
        'fig3-oscillations', SchemeId.RK4, 0.01, 3000,
        (Analysis.CLOSURE,),
        'Oscillazioni periodiche di prede e predatori nel sistema continuo.',
    ),
    _preset(
        'fig4-euler-spiral', SchemeId.EULER, 0.02, 3000,
        (Analysis.STABILITY, Analysis.POSITIVITY, Analysis.CLOSURE),
        'Eulero progressivo, h = 0.02: la traiettoria si allontana a spirale dal punto di coesistenza.',
        start=(8.0, 8.0),
    ),
    _preset(
        'fig5-euler-oscillations', SchemeId.EULER, 0.02, 3000,
        (Analysis.POSITIVITY, Analysis.CLOSURE),
        'Eulero progressivo, h = 0.02, x0 = y0 = 5: oscillazioni di ampiezza crescente.',
    ),
    _preset(
        'fig7-euler-negative', SchemeId.EULER, 0.03, 10000,
        (Analysis.STABILITY, Analysis.POSITIVITY),
        'Eulero progressivo, h = 0.03, x0 = y0 = 5: le prede diventano negative e poi tornano positive.',
    ),
    _preset(
        'fig8-mickens-overlay', SchemeId.MICKENS, 0.01, 3000,
        tuple(Analysis),
        'Schema di Mickens con phi(h) = h = 0.01 sovrapposto al riferimento continuo su [0, 20].',
        overlay_window=20.0, overlay_ref_h=1e-4,
    ),
)}


def list_presets():
    return [PRESETS[nome] for nome in sorted(PRESETS)]


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise ErroreConfigurazione(
            f'Preset sconosciuto: {name!r}. Disponibili: {", ".join(sorted(PRESETS))}.'
        ) from None
