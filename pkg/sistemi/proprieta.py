import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from django.db import models

from .exceptions import ErroreDominio
from .modello import State, first_integral, vector_field
from .schemi import PHI_DEFAULT, SchemeId, StepSize, euler_map, mickens_map
from .stabilita import SystemKind

logger = logging.getLogger(__name__)

# Distanza entro cui uno stato e' considerato sulla retta divisoria
TOLLERANZA_BORDO = 1e-12
# Deriva relativa per periodo che separa orbite chiuse da spirali
SOGLIA_DERIVA = 0.005
# Arretramento massimo dell'angolo attorno al punto di coesistenza tra due passi consecutivi
TOLLERANZA_ANGOLO = 1e-9
TOLLERANZA_SOVRAPPOSIZIONE = 0.05


class RegionId(models.TextChoices):
    I = 'I', 'Regione I'
    II = 'II', 'Regione II'
    III = 'III', 'Regione III'
    IV = 'IV', 'Regione IV'
    BOUNDARY_X = 'BoundaryX', 'Sulla retta x = delta/gamma'
    BOUNDARY_Y = 'BoundaryY', 'Sulla retta y = alpha/beta'
    EXTERIOR = 'Exterior', 'Fuori dal quadrante positivo'


class ExitCase(models.TextChoices):
    REGION_II_X = 'RegionII_xCross', 'x negativa uscendo dalla regione II'
    REGION_III_Y = 'RegionIII_yCross', 'y negativa uscendo dalla regione III'


class Verdict(models.TextChoices):
    CLOSED = 'Closed', 'Orbita chiusa'
    SPIRAL_OUT = 'SpiralOut', 'Spirale verso l\'esterno'
    SPIRAL_IN = 'SpiralIn', 'Spirale verso l\'interno'
    INCONCLUSIVE = 'Inconclusive', 'Non conclusivo'


# Segni (dx, dy) attesi in ciascuna regione:
# x decresce in I e II, cresce in III e IV; y decresce in II e III, cresce in I e IV
SEGNI_ATTESI = {
    RegionId.I: (-1, 1),
    RegionId.II: (-1, -1),
    RegionId.III: (1, -1),
    RegionId.IV: (1, 1),
}
REGIONI_INTERNE = tuple(SEGNI_ATTESI)


@dataclass(frozen=True)
class DirectionReport:
    region: RegionId
    dx_sign: int
    dy_sign: int
    conforms: bool


@dataclass(frozen=True)
class DirectionSummary:
    kind: SystemKind
    checked: int
    conforming: int
    skipped: int

    @property
    def violations(self):
        return self.checked - self.conforming


@dataclass(frozen=True)
class PositivityReport:
    first_negative_step: Optional[int] = None
    negative_variable: Optional[str] = None
    recovered_positive_step: Optional[int] = None
    exit_case: Optional[ExitCase] = None

    @property
    def is_empty(self):
        return self.first_negative_step is None


@dataclass(frozen=True)
class ClosureMetrics:
    crossings: list
    crossing_times: list
    drift_per_period: list
    v_at_crossings: list
    v_drift: Optional[float]
    verdict: Verdict
    counterclockwise: Optional[bool] = None


@dataclass(frozen=True)
class OverlayResult:
    sup_rel_error: float
    sup_rel_error_x: float
    sup_rel_error_y: float
    times: np.ndarray = field(repr=False)
    error_x: np.ndarray = field(repr=False)
    error_y: np.ndarray = field(repr=False)
    tolerance: float = TOLLERANZA_SOVRAPPOSIZIONE

    @property
    def within_tolerance(self):
        return self.sup_rel_error < self.tolerance


def _segno(valore, tolleranza=0.0):
    if valore > tolleranza:
        return 1
    if valore < -tolleranza:
        return -1
    return 0


def classify_region(p, s):
    if s.x <= 0 or s.y <= 0:
        return RegionId.EXTERIOR
    x_star, y_star = p.thresholds
    if abs(s.x - x_star) <= TOLLERANZA_BORDO:
        return RegionId.BOUNDARY_X
    if abs(s.y - y_star) <= TOLLERANZA_BORDO:
        return RegionId.BOUNDARY_Y
    destra = s.x > x_star
    sopra = s.y > y_star
    if sopra:
        return RegionId.I if destra else RegionId.II
    return RegionId.IV if destra else RegionId.III


def check_direction(kind, p, s, h=None, phi_val=None):
    """Confronta i segni dello spostamento con la tabella dei segni della regione.

    Per gli schemi discreti lo spostamento e' (x' - x, y' - y). Per Mickens il segno atteso di y
    dipende dalla regione della x AGGIORNATA.
    """
    kind = SystemKind(kind)
    regione = classify_region(p, s)
    if regione not in REGIONI_INTERNE:
        raise ErroreDominio(f'Stato ({s.x}, {s.y}) non interno a una regione: {regione.label}.')

    atteso_x, atteso_y = SEGNI_ATTESI[regione]
    if kind == SystemKind.CONTINUOUS:
        dx, dy = vector_field(p, s)
    elif kind == SystemKind.EULER:
        x_nuovo, y_nuovo = euler_map(p, StepSize.coerce(h).h, s.x, s.y)
        dx, dy = x_nuovo - s.x, y_nuovo - s.y
    else:
        x_nuovo, y_nuovo = mickens_map(p, phi_val, s.x, s.y)
        dx, dy = x_nuovo - s.x, y_nuovo - s.y
        atteso_y = _segno(x_nuovo - p.thresholds[0], TOLLERANZA_BORDO)

    segno_x, segno_y = _segno(dx), _segno(dy)
    return DirectionReport(regione, segno_x, segno_y, (segno_x, segno_y) == (atteso_x, atteso_y))


def system_kind_for(scheme):
    scheme = SchemeId(scheme)
    if scheme == SchemeId.EULER:
        return SystemKind.EULER
    if scheme == SchemeId.MICKENS:
        return SystemKind.MICKENS
    return SystemKind.CONTINUOUS


def direction_summary(traj):
    """Verifica la direzione in ogni punto interno della traiettoria, col sistema che l'ha prodotta."""
    kind = system_kind_for(traj.scheme)
    p = traj.params
    phi_val = (traj.phi or PHI_DEFAULT)(traj.h.h) if kind == SystemKind.MICKENS else None
    controllati = conformi = saltati = 0
    for x, y in zip(traj.x, traj.y):
        s = State(float(x), float(y))
        if classify_region(p, s) not in REGIONI_INTERNE:
            saltati += 1
            continue
        esito = check_direction(kind, p, s, h=traj.h.h, phi_val=phi_val)
        controllati += 1
        conformi += esito.conforms
    if controllati != conformi:
        logger.warning(f'Direzione non conforme in {controllati - conformi} punti ({kind.value})')
    return DirectionSummary(kind, controllati, conformi, saltati)


def monitor_positivity(traj):
    """Primo passo con una coordinata negativa, caso di uscita e eventuale ritorno a valori positivi."""
    if len(traj) == 0:
        raise ErroreDominio('Traiettoria vuota.')
    negativi = np.flatnonzero((traj.x < 0) | (traj.y < 0))
    if negativi.size == 0:
        return PositivityReport()

    i = int(negativi[0])
    variabile = 'x' if traj.x[i] < 0 else 'y'
    serie = traj.x if variabile == 'x' else traj.y
    successivi = np.flatnonzero(serie[i + 1:] > 0)
    recupero = int(traj.steps[i + 1 + successivi[0]]) if successivi.size else None

    caso = None
    if i > 0:
        regione_prec = classify_region(traj.params, traj.state(i - 1))
        if variabile == 'x' and regione_prec == RegionId.II:
            caso = ExitCase.REGION_II_X
        elif variabile == 'y' and regione_prec == RegionId.III:
            caso = ExitCase.REGION_III_Y
    return PositivityReport(int(traj.steps[i]), variabile, recupero, caso)


def _verdetto(derive):
    if all(abs(d) < SOGLIA_DERIVA for d in derive):
        return Verdict.CLOSED
    if all(d > SOGLIA_DERIVA for d in derive):
        return Verdict.SPIRAL_OUT
    if all(d < -SOGLIA_DERIVA for d in derive):
        return Verdict.SPIRAL_IN
    return Verdict.INCONCLUSIVE


def measure_closure(traj, p=None):
    """Attraversamenti verso l'alto della sezione {y = alpha/beta, x > delta/gamma}.

    La posizione di ogni attraversamento e' interpolata linearmente tra i due passi che lo racchiudono.
    """
    p = p or traj.params
    x_star, y_star = p.thresholds
    s0 = traj.initial_state
    if not s0.is_positive():
        raise ErroreDominio(f'La misura di chiusura richiede un inizio nel quadrante aperto, ricevuto ({s0.x}, {s0.y}).')
    if math.hypot(s0.x - x_star, s0.y - y_star) <= 1e-6:
        raise ErroreDominio('La misura di chiusura non e\' definita partendo dal punto di coesistenza.')

    x, y, t = traj.x, traj.y, traj.t
    indici = np.flatnonzero((y[:-1] < y_star) & (y[1:] >= y_star))
    r = (y_star - y[indici]) / (y[indici + 1] - y[indici])
    x_sez = x[indici] + r * (x[indici + 1] - x[indici])
    t_sez = t[indici] + r * (t[indici + 1] - t[indici])
    sulla_sezione = x_sez > x_star
    indici, x_sez, t_sez = indici[sulla_sezione], x_sez[sulla_sezione], t_sez[sulla_sezione]

    attraversamenti = [float(v) for v in x_sez]
    valori_v = [first_integral(p, State(v, y_star)) for v in attraversamenti]

    antiorario = None
    if len(indici) >= 2:
        # angolo passo per passo dal primo all'ultimo attraversamento
        tratto = slice(indici[0] + 1, indici[-1] + 2)
        angolo = np.unwrap(np.arctan2(y[tratto] - y_star, x[tratto] - x_star))
        antiorario = bool(np.all(np.diff(angolo) > -TOLLERANZA_ANGOLO) and angolo[-1] > angolo[0])

    if len(attraversamenti) < 3:
        return ClosureMetrics(attraversamenti, [float(v) for v in t_sez], [], valori_v, None,
                              Verdict.INCONCLUSIVE, antiorario)

    derive = [(b - a) / a for a, b in zip(attraversamenti, attraversamenti[1:])]
    riferimento_v = abs(valori_v[0]) or 1.0
    deriva_v = (valori_v[-1] - valori_v[0]) / riferimento_v
    return ClosureMetrics(attraversamenti, [float(v) for v in t_sez], derive, valori_v, deriva_v,
                          _verdetto(derive), antiorario)


def _scala(valori):
    ampiezza = float(np.max(valori) - np.min(valori)) if valori.size else 0.0
    if ampiezza > 0:
        return ampiezza
    return max(float(np.max(np.abs(valori))) if valori.size else 0.0, 1.0)


def compare_overlay(a, b, tolerance=TOLLERANZA_SOVRAPPOSIZIONE):
    """Errore relativo massimo tra due traiettorie, normalizzato sull'ampiezza di b.

    La traiettoria col passo piu' fine viene ricampionata (interpolazione lineare) sui tempi dell'altra.
    """
    if a.params != b.params:
        raise ErroreDominio('Le traiettorie da sovrapporre devono avere gli stessi parametri.')
    if a.initial_state != b.initial_state:
        raise ErroreDominio('Le traiettorie da sovrapporre devono partire dallo stesso stato.')
    inizio = max(a.t[0], b.t[0])
    termine = min(a.t[-1], b.t[-1])
    if termine < inizio:
        raise ErroreDominio(f'Intervalli temporali disgiunti: [{a.t[0]}, {a.t[-1]}] e [{b.t[0]}, {b.t[-1]}].')

    a_grossa = a.h.h >= b.h.h
    grossa, fine_traj = (a, b) if a_grossa else (b, a)
    # piccolo margine per non perdere l'ultimo tempo per arrotondamento
    margine = 1e-9 * max(1.0, abs(termine))
    dentro = (grossa.t >= inizio - margine) & (grossa.t <= termine + margine)
    tempi = grossa.t[dentro]
    gx, gy = grossa.x[dentro], grossa.y[dentro]
    fx = np.interp(tempi, fine_traj.t, fine_traj.x)
    fy = np.interp(tempi, fine_traj.t, fine_traj.y)
    (ax, ay), (bx, by) = ((gx, gy), (fx, fy)) if a_grossa else ((fx, fy), (gx, gy))

    errore_x = np.abs(ax - bx) / _scala(bx)
    errore_y = np.abs(ay - by) / _scala(by)
    sup_x = float(np.max(errore_x)) if errore_x.size else 0.0
    sup_y = float(np.max(errore_y)) if errore_y.size else 0.0
    return OverlayResult(max(sup_x, sup_y), sup_x, sup_y, tempi, errore_x, errore_y, tolerance)


def global_error(traj, reference):
    """Massimo, sui tempi della traiettoria, della distanza (norma del massimo) dal riferimento."""
    ex = np.abs(traj.x - np.interp(traj.t, reference.t, reference.x))
    ey = np.abs(traj.y - np.interp(traj.t, reference.t, reference.y))
    return float(np.max(np.maximum(ex, ey)))


def observed_order(errors, ratio=2.0):
    return [math.log(e1 / e2) / math.log(ratio) for e1, e2 in zip(errors, errors[1:])]
