import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from django.core.exceptions import ValidationError
from django.db import models

from .exceptions import ErroreDominio
from .modello import ModelParams, State

logger = logging.getLogger(__name__)


class SchemeId(models.TextChoices):
    EULER = 'euler', 'Eulero progressivo'
    MICKENS = 'mickens', 'Mickens (differenze finite non standard)'
    RK4 = 'rk4', 'Runge-Kutta 4 (riferimento)'


@dataclass(frozen=True)
class StepSize:
    h: float

    def __post_init__(self):
        valore = self.h
        if isinstance(valore, bool) or not isinstance(valore, (int, float)) or not math.isfinite(valore):
            raise ValidationError({'h': f'Il passo deve essere un numero finito (ricevuto {valore!r}).'})
        if valore <= 0:
            raise ValidationError({'h': f'Il passo deve essere strettamente positivo (ricevuto {valore!r}).'})
        object.__setattr__(self, 'h', float(valore))

    #Accetta sia StepSize sia un float "nudo"
    @classmethod
    def coerce(cls, valore):
        if isinstance(valore, cls):
            return valore
        return cls(valore)


# Passi su cui si stima la costante C di |phi(h)/h - 1| <= C*h
PHI_GRIGLIA = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
PHI_COSTANTE_MAX = 1e3


@dataclass(frozen=True)
class PhiFunction:
    """Funzione denominatore phi(h) dello schema di Mickens, con phi(h) = h + O(h^2)."""

    name: str
    funzione: Callable[[float], float]

    def __post_init__(self):
        for h in PHI_GRIGLIA + (1.0,):
            valore = self.funzione(h)
            if not (math.isfinite(valore) and valore > 0):
                raise ValidationError({'phi': f'phi({h}) deve essere positivo e finito (ricevuto {valore!r}).'})
        costante = self.consistency_constant()
        if not costante <= PHI_COSTANTE_MAX:
            raise ValidationError({
                'phi': f'phi non e\' della forma h + O(h^2): costante stimata {costante!r}.'
            })

    def __call__(self, h):
        return float(self.funzione(h))

    def consistency_constant(self):
        return max(abs(self.funzione(h) / h - 1.0) / h for h in PHI_GRIGLIA)


def _phi_identita(h):
    return h


def _phi_expm1(h):
    # 1 - e^(-h), calcolato senza cancellazione
    return -math.expm1(-h)


PHI_OPTIONS = {
    'identity': PhiFunction('identity', _phi_identita),
    'expm1': PhiFunction('expm1', _phi_expm1),
}
PHI_DEFAULT = PHI_OPTIONS['identity']


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sequenza ordinata (i, t_i = i*h, stato_i) prodotta da uno schema.

    truncated_at e' l'indice del primo passo non finito (escluso dalla traiettoria), None se non c'e' divergenza.
    """

    scheme: SchemeId
    params: ModelParams
    h: StepSize
    steps: np.ndarray
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    phi: Optional[PhiFunction] = None
    truncated_at: Optional[int] = None

    def __len__(self):
        return len(self.steps)

    @property
    def points(self):
        for i, t, x, y in zip(self.steps, self.t, self.x, self.y):
            yield int(i), float(t), State(float(x), float(y))

    def state(self, i):
        return State(float(self.x[i]), float(self.y[i]))

    @property
    def initial_state(self):
        return self.state(0)

    @property
    def final_state(self):
        return self.state(-1)

    @property
    def diverged(self):
        return self.truncated_at is not None


# Mappe di passo: lavorano elemento per elemento su float o su array numpy

def euler_map(p, h, x, y):
    return x + h * (p.alpha * x - p.beta * x * y), y + h * (p.gamma * x * y - p.delta * y)


def mickens_map(p, phi_val, x, y):
    # forma sequenziale: prima x_{i+1}, poi y_{i+1} usando la x appena calcolata
    x_nuovo = x * (2 * p.alpha * phi_val + 1) / (1 + p.alpha * phi_val + p.beta * phi_val * y)
    y_nuovo = y * (2 * p.gamma * phi_val * x_nuovo + 1) / (1 + p.gamma * phi_val * x_nuovo + p.delta * phi_val)
    return x_nuovo, y_nuovo


def mickens_closed_form_map(p, phi_val, x, y):
    a = 2 * p.alpha * phi_val + 1
    b = 1 + p.alpha * phi_val + p.beta * phi_val * y
    x_nuovo = x * a / b
    y_nuovo = (2 * p.gamma * phi_val * x * y * a + y * b) / ((1 + p.delta * phi_val) * b + p.gamma * phi_val * x * a)
    return x_nuovo, y_nuovo


def rk4_map(p, h, x, y):
    def f(u, v):
        return p.alpha * u - p.beta * u * v, -p.delta * v + p.gamma * u * v

    k1x, k1y = f(x, y)
    k2x, k2y = f(x + 0.5 * h * k1x, y + 0.5 * h * k1y)
    k3x, k3y = f(x + 0.5 * h * k2x, y + 0.5 * h * k2y)
    k4x, k4y = f(x + h * k3x, y + h * k3y)
    return (
        x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x),
        y + h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y),
    )


def _stato_da_passo(x, y):
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ErroreDominio(f'Il passo ha prodotto uno stato non finito ({x}, {y}).')
    return State(x, y)


def euler_step(p, h, s):
    """Eulero progressivo, senza alcuna correzione di segno."""
    h = StepSize.coerce(h)
    return _stato_da_passo(*euler_map(p, h.h, s.x, s.y))


def _richiedi_non_negativo(s):
    if s.x < 0 or s.y < 0:
        raise ErroreDominio(
            f'Lo schema di Mickens richiede coordinate non negative, ricevuto ({s.x}, {s.y}).'
        )


def mickens_step(p, phi, h, s):
    h = StepSize.coerce(h)
    _richiedi_non_negativo(s)
    phi = phi or PHI_DEFAULT
    return _stato_da_passo(*mickens_map(p, phi(h.h), s.x, s.y))


def mickens_closed_form(p, phi_val, s):
    _richiedi_non_negativo(s)
    return _stato_da_passo(*mickens_closed_form_map(p, phi_val, s.x, s.y))


def rk4_step(p, h, s):
    h = StepSize.coerce(h)
    return _stato_da_passo(*rk4_map(p, h.h, s.x, s.y))


def step_function(scheme, p, phi, h):
    """Restituisce la mappa (x, y) -> (x', y') dello schema con parametri fissati."""
    scheme = SchemeId(scheme)
    h = StepSize.coerce(h)
    if scheme == SchemeId.EULER:
        return lambda x, y: euler_map(p, h.h, x, y)
    if scheme == SchemeId.MICKENS:
        phi_val = (phi or PHI_DEFAULT)(h.h)
        return lambda x, y: mickens_map(p, phi_val, x, y)
    return lambda x, y: rk4_map(p, h.h, x, y)


def simulate(scheme, p, phi, h, s0, n_steps):
    """Itera lo schema per n_steps passi a partire da s0.

    Si ferma al primo stato non finito e registra l'indice in truncated_at.
    """
    scheme = SchemeId(scheme)
    h = StepSize.coerce(h)
    if isinstance(n_steps, bool) or int(n_steps) != n_steps or n_steps < 0:
        raise ErroreDominio(f'n_steps deve essere un intero >= 0 (ricevuto {n_steps!r}).')
    n_steps = int(n_steps)
    if scheme == SchemeId.MICKENS:
        _richiedi_non_negativo(s0)
        phi = phi or PHI_DEFAULT

    passo = step_function(scheme, p, phi, h)
    xs = np.empty(n_steps + 1)
    ys = np.empty(n_steps + 1)
    x, y = s0.x, s0.y
    xs[0], ys[0] = x, y
    lunghezza = n_steps + 1
    troncata = None

    for i in range(1, n_steps + 1):
        x, y = passo(x, y)
        if not (math.isfinite(x) and math.isfinite(y)):
            troncata = i
            lunghezza = i
            logger.warning(f'Traiettoria {scheme.value} divergente: troncata al passo {i} (h={h.h})')
            break
        xs[i] = x
        ys[i] = y

    steps = np.arange(lunghezza)
    return Trajectory(
        scheme=scheme,
        params=p,
        h=h,
        steps=steps,
        t=steps * h.h,
        x=xs[:lunghezza],
        y=ys[:lunghezza],
        phi=phi if scheme == SchemeId.MICKENS else None,
        truncated_at=troncata,
    )


def simulate_ensemble(scheme, p, phi, h, starts, n_steps):
    return [simulate(scheme, p, phi, h, s0, n_steps) for s0 in starts]
