import numpy as np
from hypothesis import strategies as st

from sistemi.modello import Matrix2, ModelParams, State

# Parametri nell'intervallo usato dalle verifiche a campione
MIN_PARAMETRO, MAX_PARAMETRO = 0.1, 5.0

PARAMETRI_FIGURE = ModelParams(alpha=1.0, beta=0.1, gamma=0.075, delta=0.75)


def tassi():
    return st.floats(MIN_PARAMETRO, MAX_PARAMETRO, allow_nan=False, allow_infinity=False)


def parametri():
    return st.builds(ModelParams, tassi(), tassi(), tassi(), tassi())


def stati_positivi(massimo=50.0):
    coordinata = st.floats(1e-3, massimo, allow_nan=False, allow_infinity=False)
    return st.builds(State, coordinata, coordinata)


def passi(minimo=1e-3, massimo=5.0):
    return st.floats(minimo, massimo, allow_nan=False, allow_infinity=False)


def parametri_casuali(rng):
    """Estrazione riproducibile per le verifiche a conteggio fisso (100/200/1000 estrazioni)."""
    return ModelParams(*rng.uniform(MIN_PARAMETRO, MAX_PARAMETRO, size=4))


def generatore(seme):
    return np.random.default_rng(seme)


def differenze_finite(mappa, s, eps=1e-6):
    """Jacobiana della mappa per differenze centrali, con incremento relativo alla coordinata."""
    colonne = []
    for dx, dy in ((1, 0), (0, 1)):
        passo = eps * max(1.0, abs(s.x) if dx else abs(s.y))
        avanti = mappa(s.x + dx * passo, s.y + dy * passo)
        indietro = mappa(s.x - dx * passo, s.y - dy * passo)
        colonne.append(((avanti[0] - indietro[0]) / (2 * passo), (avanti[1] - indietro[1]) / (2 * passo)))
    (a, c), (b, d) = colonne
    return Matrix2(a, b, c, d)
