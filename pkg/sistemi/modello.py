import math
from dataclasses import dataclass

from django.core.exceptions import ValidationError

from .exceptions import ErroreDominio

# Modello preda-predatore di Lotka-Volterra:
#   x' = alpha*x - beta*x*y
#   y' = -delta*y + gamma*x*y
# x = densita' delle prede, y = densita' dei predatori


def _finito(valore):
    try:
        return math.isfinite(valore)
    except TypeError:
        return False


@dataclass(frozen=True)
class ModelParams:
    """I quattro tassi del modello, tutti strettamente positivi e finiti."""

    alpha: float  # crescita delle prede (1/tempo)
    beta: float   # predazione (1/(densita'*tempo))
    gamma: float  # conversione (1/(densita'*tempo))
    delta: float  # mortalita' dei predatori (1/tempo)

    def __post_init__(self):
        errori = {}
        for nome in ('alpha', 'beta', 'gamma', 'delta'):
            valore = getattr(self, nome)
            if isinstance(valore, bool) or not _finito(valore):
                errori[nome] = f'{nome} deve essere un numero finito (ricevuto {valore!r}).'
            elif valore <= 0:
                errori[nome] = f'{nome} deve essere strettamente positivo (ricevuto {valore!r}).'
        if errori:
            raise ValidationError(errori)
        # normalizza a float (es. interi passati da CLI o test)
        for nome in ('alpha', 'beta', 'gamma', 'delta'):
            object.__setattr__(self, nome, float(getattr(self, nome)))

    # Rette che dividono il quadrante positivo nelle regioni I-IV: x = delta/gamma e y = alpha/beta
    @property
    def thresholds(self):
        return self.delta / self.gamma, self.alpha / self.beta

    def as_tuple(self):
        return self.alpha, self.beta, self.gamma, self.delta


@dataclass(frozen=True)
class State:
    """Coppia (x, y) di densita'. La non negativita' NON e' un invariante: Eulero produce valori negativi."""

    x: float
    y: float

    def __post_init__(self):
        errori = {}
        for nome in ('x', 'y'):
            valore = getattr(self, nome)
            if isinstance(valore, bool) or not _finito(valore):
                errori[nome] = f'La coordinata {nome} deve essere finita (ricevuto {valore!r}).'
        if errori:
            raise ValidationError(errori)
        object.__setattr__(self, 'x', float(self.x))
        object.__setattr__(self, 'y', float(self.y))

    def is_positive(self):
        return self.x > 0 and self.y > 0

    def as_tuple(self):
        return self.x, self.y


@dataclass(frozen=True)
class Matrix2:
    """Matrice 2x2 per righe: ((a, b), (c, d))."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not all(_finito(v) for v in (self.a, self.b, self.c, self.d)):
            raise ErroreDominio(f'Matrice con elementi non finiti: {self.rows()}')

    @property
    def trace(self):
        return self.a + self.d

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def rows(self):
        return (self.a, self.b), (self.c, self.d)


@dataclass(frozen=True)
class FixedPointPair:
    origin: State
    coexistence: State


def vector_field(p, s):
    """Campo vettoriale continuo: (alpha*x - beta*x*y, -delta*y + gamma*x*y)."""
    x, y = s.x, s.y
    return p.alpha * x - p.beta * x * y, -p.delta * y + p.gamma * x * y


def continuous_jacobian(p, s):
    return Matrix2(
        p.alpha - p.beta * s.y, -p.beta * s.x,
        p.gamma * s.y, p.gamma * s.x - p.delta,
    )


def fixed_points(p):
    # Gli stessi due punti sono fissi anche per gli schemi di Eulero e di Mickens
    x_star, y_star = p.thresholds
    return FixedPointPair(origin=State(0.0, 0.0), coexistence=State(x_star, y_star))


def _richiedi_positivo(s):
    if not (s.x > 0 and s.y > 0):
        raise ErroreDominio(
            f"L'integrale primo e' definito solo nel quadrante aperto, ricevuto ({s.x}, {s.y})."
        )


def first_integral(p, s):
    """V(x, y) = gamma*x - delta*ln(x) + beta*y - alpha*ln(y), costante lungo le soluzioni esatte.

    Il minimo globale di V sul quadrante aperto e' nel punto di coesistenza (delta/gamma, alpha/beta).
    """
    _richiedi_positivo(s)
    return p.gamma * s.x - p.delta * math.log(s.x) + p.beta * s.y - p.alpha * math.log(s.y)


def first_integral_gradient(p, s):
    _richiedi_positivo(s)
    return p.gamma - p.delta / s.x, p.beta - p.alpha / s.y
