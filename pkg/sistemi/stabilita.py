import math
from dataclasses import dataclass, field

from django.db import models

from .exceptions import ErroreDominio, PuntoNonFisso
from .modello import Matrix2, State, continuous_jacobian, fixed_points, vector_field
from .schemi import PHI_DEFAULT, StepSize

# Moduli (o parti reali) entro questa banda dalla soglia sono considerati "sulla soglia"
TOLLERANZA_SOGLIA = 1e-9
# Residuo relativo massimo del campo vettoriale per accettare un punto come fisso,
# rispetto al termine piu' grande tra alpha*x, beta*x*y, gamma*x*y, delta*y
TOLLERANZA_PUNTO_FISSO = 1e-9


class SystemKind(models.TextChoices):
    CONTINUOUS = 'continuous', 'Sistema continuo'
    EULER = 'euler', 'Schema di Eulero'
    MICKENS = 'mickens', 'Schema di Mickens'


class Classification(models.TextChoices):
    SADDLE_POINT = 'SaddlePoint', 'Punto di sella'
    SOURCE = 'Source', 'Sorgente'
    SINK = 'Sink', 'Pozzo'
    UNSTABLE_FOCUS = 'UnstableFocus', 'Fuoco instabile'
    STABLE_FOCUS = 'StableFocus', 'Fuoco stabile'
    LINEAR_CENTER = 'LinearCenter', 'Centro (linearizzato)'
    NON_HYPERBOLIC = 'NonHyperbolic', 'Non iperbolico'


NOTA_CENTRO_CONTINUO = (
    "Centro del sistema linearizzato: nulla si puo' concludere sulla stabilita' del sistema non lineare."
)
NOTA_FUOCO_EULERO = (
    "Autovalori complessi coniugati 1 ± i·sqrt(alpha·delta)·h, di modulo sqrt(1 + alpha·delta·h^2) > 1 "
    "per ogni h > 0."
)
NOTA_CENTRO_MICKENS = (
    "Centro del linearizzato (|lambda| = 1): la chiusura delle orbite si verifica numericamente "
    "per ogni insieme di parametri, senza pretesa di universalita'."
)
NOTA_SOGLIA_EULERO = "h = 2/delta entro la tolleranza: caso soglia non iperbolico."


@dataclass(frozen=True)
class Eigenpair:
    lambda1: complex
    lambda2: complex

    @property
    def moduli(self):
        return abs(self.lambda1), abs(self.lambda2)

    @property
    def is_complex(self):
        return self.lambda1.imag != 0 or self.lambda2.imag != 0

    # |lambda^2 - tr*lambda + det| per ciascun autovalore
    def residuals(self, m):
        return tuple(abs(lam * lam - m.trace * lam + m.det) for lam in (self.lambda1, self.lambda2))


@dataclass(frozen=True)
class StabilityReport:
    kind: SystemKind
    point: State
    jacobian: Matrix2
    eigen: Eigenpair
    classification: Classification
    notes: tuple = field(default_factory=tuple)


def eig2(m):
    """Radici di lambda^2 - tr(m)*lambda + det(m) in forma chiusa.

    Reali: in ordine crescente. Complesse: prima quella con parte immaginaria positiva.
    """
    tr = m.trace
    det = m.det
    # tr^2 - 4 det riscritto senza cancellazione
    disc = (m.a - m.d) ** 2 + 4 * m.b * m.c
    if disc >= 0:
        radice = math.sqrt(disc)
        r1 = (tr + math.copysign(radice, tr)) / 2
        r2 = det / r1 if r1 != 0 else (tr - math.copysign(radice, tr)) / 2
        basso, alto = sorted((r1, r2))
        return Eigenpair(complex(basso, 0.0), complex(alto, 0.0))
    parte_reale = tr / 2
    parte_immaginaria = math.sqrt(-disc) / 2
    return Eigenpair(complex(parte_reale, parte_immaginaria), complex(parte_reale, -parte_immaginaria))


def euler_jacobian(p, h, s):
    h = StepSize.coerce(h).h
    return Matrix2(
        1 + p.alpha * h - p.beta * h * s.y, -p.beta * h * s.x,
        p.gamma * h * s.y, 1 + p.gamma * h * s.x - p.delta * h,
    )


def mickens_jacobian(p, phi_val, s):
    """Jacobiana della mappa di Mickens nella forma chiusa (elementi a, b, c, d)."""
    if not (phi_val > 0 and math.isfinite(phi_val)):
        raise ErroreDominio(f'phi deve essere positivo e finito (ricevuto {phi_val!r}).')
    if s.x < 0 or s.y < 0:
        raise ErroreDominio(f'Jacobiana di Mickens definita per coordinate non negative, ricevuto ({s.x}, {s.y}).')
    x, y = s.x, s.y
    alpha, beta, gamma, delta = p.as_tuple()
    phi = phi_val

    coeff = 2 * alpha * phi + 1            # 2*alpha*phi + 1
    den_x = beta * phi * y + alpha * phi + 1
    fatt_d = delta * phi + 1
    den_y = coeff * gamma * phi * x + den_x * fatt_d
    num_y = 2 * coeff * gamma * phi * x * y + den_x * y

    a = coeff / den_x
    b = -coeff * beta * phi * x / den_x ** 2
    c = 2 * coeff * gamma * phi * y / den_y - num_y * coeff * gamma * phi / den_y ** 2
    d = (
        -num_y * fatt_d * beta * phi / den_y ** 2
        + (2 * coeff * gamma * phi * x + 2 * beta * phi * y + alpha * phi + 1) / den_y
    )
    return Matrix2(a, b, c, d)


def mickens_center_eigenvalues(p, phi_val):
    """Coppia coniugata in forma chiusa nel punto di coesistenza (solo per controllo incrociato)."""
    alpha, delta = p.alpha, p.delta
    phi = phi_val
    prodotto = alpha * delta
    reale = 7 * prodotto * phi ** 2 + 4 * (alpha + delta) * phi + 2
    radicando = 15 * prodotto ** 2 * phi ** 2 + 4 * prodotto + 8 * (alpha ** 2 * delta + alpha * delta ** 2) * phi
    immaginaria = phi * math.sqrt(radicando)
    denominatore = 2 * (4 * prodotto * phi ** 2 + 2 * (alpha + delta) * phi + 1)
    return Eigenpair((reale + 1j * immaginaria) / denominatore, (reale - 1j * immaginaria) / denominatore)


def _classifica(valori, complesso, soglia):
    # valori: moduli (sistemi discreti, soglia 1) o parti reali (continuo, soglia 0)
    vicini = [abs(v - soglia) <= TOLLERANZA_SOGLIA for v in valori]
    if any(vicini):
        if complesso and all(vicini):
            return Classification.LINEAR_CENTER
        return Classification.NON_HYPERBOLIC
    sotto = [v < soglia for v in valori]
    if all(sotto):
        return Classification.STABLE_FOCUS if complesso else Classification.SINK
    if not any(sotto):
        return Classification.UNSTABLE_FOCUS if complesso else Classification.SOURCE
    return Classification.SADDLE_POINT


def classify_discrete_eigen(eig):
    return _classifica(eig.moduli, eig.is_complex, 1.0)


def classify_continuous_eigen(eig):
    return _classifica((eig.lambda1.real, eig.lambda2.real), eig.is_complex, 0.0)


def _richiedi_punto_fisso(p, point):
    dx, dy = vector_field(p, point)
    residuo = max(abs(dx), abs(dy))
    prodotto = abs(point.x * point.y)
    scala = max(1.0, abs(p.alpha * point.x), p.beta * prodotto, p.gamma * prodotto, abs(p.delta * point.y))
    if residuo > TOLLERANZA_PUNTO_FISSO * scala:
        raise PuntoNonFisso(f'({point.x}, {point.y}) non e\' un punto fisso: residuo {residuo:.3e}.')


def _e_origine(point):
    return point.x == 0 and point.y == 0


def classify_continuous(p, point):
    _richiedi_punto_fisso(p, point)
    jac = continuous_jacobian(p, point)
    eig = eig2(jac)
    classe = classify_continuous_eigen(eig)
    note = (NOTA_CENTRO_CONTINUO,) if classe == Classification.LINEAR_CENTER else ()
    return StabilityReport(SystemKind.CONTINUOUS, point, jac, eig, classe, note)


def classify_euler(p, h, point):
    h = StepSize.coerce(h)
    _richiedi_punto_fisso(p, point)
    jac = euler_jacobian(p, h, point)
    eig = eig2(jac)
    note = ()
    if _e_origine(point) and abs(h.h - 2 / p.delta) <= TOLLERANZA_SOGLIA:
        classe = Classification.NON_HYPERBOLIC
        note = (NOTA_SOGLIA_EULERO,)
    else:
        classe = classify_discrete_eigen(eig)
    if not _e_origine(point):
        note = (NOTA_FUOCO_EULERO,)
    return StabilityReport(SystemKind.EULER, point, jac, eig, classe, note)


def classify_mickens(p, phi_val, point):
    _richiedi_punto_fisso(p, point)
    jac = mickens_jacobian(p, phi_val, point)
    eig = eig2(jac)
    classe = classify_discrete_eigen(eig)
    note = (NOTA_CENTRO_MICKENS,) if classe == Classification.LINEAR_CENTER else ()
    return StabilityReport(SystemKind.MICKENS, point, jac, eig, classe, note)


def stability_reports(kind, p, h=None, phi=None):
    """Classifica entrambi i punti fissi (origine, coesistenza) per un tipo di sistema."""
    kind = SystemKind(kind)
    punti = fixed_points(p)
    if kind == SystemKind.CONTINUOUS:
        return [classify_continuous(p, s) for s in (punti.origin, punti.coexistence)]
    if kind == SystemKind.EULER:
        return [classify_euler(p, h, s) for s in (punti.origin, punti.coexistence)]
    phi_val = (phi or PHI_DEFAULT)(StepSize.coerce(h).h)
    return [classify_mickens(p, phi_val, s) for s in (punti.origin, punti.coexistence)]
