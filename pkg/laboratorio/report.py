import csv
import logging
import math
import os
from contextlib import contextmanager
from pathlib import Path

import numpy as np
from lxml import etree
from rest_framework.renderers import JSONRenderer

from sistemi.modello import State, first_integral, fixed_points
from sistemi.schemi import SchemeId, StepSize, Trajectory

from .exceptions import ErroreConfigurazione, ErroreIO
from .serializers import RunReportSerializer

logger = logging.getLogger(__name__)

INTESTAZIONE_CSV = ['step', 't', 'x', 'y', 'V']
SUFFISSO_PARZIALE = '.partial'

SVG_NS = 'http://www.w3.org/2000/svg'
LARGHEZZA, ALTEZZA, MARGINE = 800, 600, 50
# Oltre questo numero di punti le polilinee vengono campionate a passo fisso
PUNTI_MAX_POLILINEA = 4000
COLORI = ('#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b')


@contextmanager
def scrittura_atomica(path, mode='w'):
    """Scrive su <path>.partial e rinomina solo a scrittura completata.

    In caso di errore il file parziale viene rimosso e si solleva ErroreIO col percorso.
    """
    path = Path(path)
    parziale = path.with_name(path.name + SUFFISSO_PARZIALE)
    try:
        kwargs = {'encoding': 'utf-8', 'newline': ''} if 'b' not in mode else {}
        with open(parziale, mode, **kwargs) as handle:
            yield handle
        os.replace(parziale, path)
    except OSError as e:
        parziale.unlink(missing_ok=True)
        raise ErroreIO(f'Scrittura di {path} fallita: {e}') from e
    except BaseException:
        parziale.unlink(missing_ok=True)
        raise
    logger.info(f'Scritto {path}')


def _numero(valore):
    # repr di un float: decimale piu' corto che rilegge lo stesso double (al piu' 17 cifre)
    return repr(float(valore))


def emit_csv(traj, path):
    p = traj.params
    with scrittura_atomica(path) as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(INTESTAZIONE_CSV)
        for i, t, x, y in zip(traj.steps, traj.t, traj.x, traj.y):
            v = _numero(first_integral(p, State(float(x), float(y)))) if x > 0 and y > 0 else ''
            writer.writerow([int(i), _numero(t), _numero(x), _numero(y), v])


def parse_csv(path, scheme, params, h, phi=None):
    """Rilegge un CSV prodotto da emit_csv; la colonna V viene ignorata (si ricalcola dai parametri)."""
    path = Path(path)
    h = StepSize.coerce(h)
    passi, tempi, xs, ys = [], [], [], []
    try:
        with open(path, encoding='utf-8', newline='') as handle:
            reader = csv.reader(handle)
            intestazione = next(reader, None)
            if intestazione != INTESTAZIONE_CSV:
                raise ErroreConfigurazione(f'{path}: intestazione non valida {intestazione!r}.')
            for numero_riga, riga in enumerate(reader, start=2):
                try:
                    passo, t, x, y, _ = riga
                    passi.append(int(passo))
                    tempi.append(float(t))
                    xs.append(float(x))
                    ys.append(float(y))
                except ValueError as e:
                    raise ErroreConfigurazione(f'{path}, riga {numero_riga}: {e}') from e
    except OSError as e:
        raise ErroreIO(f'Lettura di {path} fallita: {e}') from e

    scheme = SchemeId(scheme)
    return Trajectory(
        scheme=scheme,
        params=params,
        h=h,
        steps=np.array(passi, dtype=int),
        t=np.array(tempi),
        x=np.array(xs),
        y=np.array(ys),
        phi=phi if scheme == SchemeId.MICKENS else None,
    )


def emit_report_json(report, path):
    dati = RunReportSerializer(report).data
    contenuto = JSONRenderer().render(dati, renderer_context={'indent': 2})
    with scrittura_atomica(path, 'wb') as handle:
        handle.write(contenuto)
        handle.write(b'\n')


class _Riquadro:
    """Trasformazione affine dal piano dei dati al riquadro in pixel (asse y verso l'alto)."""

    def __init__(self, x_min, x_max, y_min, y_max, sinistra, alto, larghezza, altezza):
        self.x_min, self.y_min = x_min, y_min
        self.x_span = (x_max - x_min) or 1.0
        self.y_span = (y_max - y_min) or 1.0
        self.sinistra, self.alto = sinistra, alto
        self.larghezza, self.altezza = larghezza, altezza

    def px(self, x):
        return self.sinistra + (x - self.x_min) / self.x_span * self.larghezza

    def py(self, y):
        return self.alto + self.altezza - (y - self.y_min) / self.y_span * self.altezza

    def punti(self, xs, ys):
        passo = max(1, math.ceil(len(xs) / PUNTI_MAX_POLILINEA))
        indici = np.arange(0, len(xs), passo)
        if len(xs) and indici[-1] != len(xs) - 1:
            indici = np.append(indici, len(xs) - 1)
        return ' '.join(f'{self.px(xs[i]):.2f},{self.py(ys[i]):.2f}' for i in indici)


def _limiti(valori, includi=()):
    basso = min([float(np.min(v)) for v in valori] + list(includi))
    alto = max([float(np.max(v)) for v in valori] + list(includi))
    margine = 0.05 * ((alto - basso) or 1.0)
    return basso - margine, alto + margine


def _radice_svg(titolo):
    radice = etree.Element(f'{{{SVG_NS}}}svg', nsmap={None: SVG_NS}, attrib={
        'version': '1.1',
        'width': str(LARGHEZZA),
        'height': str(ALTEZZA),
        'viewBox': f'0 0 {LARGHEZZA} {ALTEZZA}',
    })
    etree.SubElement(radice, f'{{{SVG_NS}}}title').text = titolo
    return radice


def _elemento(genitore, tag, **attributi):
    return etree.SubElement(genitore, f'{{{SVG_NS}}}{tag}', attrib={
        k.rstrip('_').replace('_', '-'): str(v) for k, v in attributi.items()
    })


def _testo(genitore, x, y, contenuto, **attributi):
    elemento = _elemento(genitore, 'text', x=f'{x:.2f}', y=f'{y:.2f}', font_size=12, **attributi)
    elemento.text = contenuto
    return elemento


def _cornice(genitore, riquadro, etichetta_x, etichetta_y):
    _elemento(genitore, 'rect', class_='cornice', x=f'{riquadro.sinistra:.2f}', y=f'{riquadro.alto:.2f}',
              width=f'{riquadro.larghezza:.2f}', height=f'{riquadro.altezza:.2f}', fill='none', stroke='#444444')
    basso = riquadro.alto + riquadro.altezza
    _testo(genitore, riquadro.sinistra + riquadro.larghezza / 2, basso + 30, etichetta_x, text_anchor='middle')
    _testo(genitore, riquadro.sinistra - 35, riquadro.alto + riquadro.altezza / 2, etichetta_y, text_anchor='middle')
    _testo(genitore, riquadro.sinistra, basso + 15, f'{riquadro.x_min:.3g}', text_anchor='middle')
    _testo(genitore, riquadro.sinistra + riquadro.larghezza, basso + 15,
           f'{riquadro.x_min + riquadro.x_span:.3g}', text_anchor='middle')
    _testo(genitore, riquadro.sinistra - 5, basso, f'{riquadro.y_min:.3g}', text_anchor='end')
    _testo(genitore, riquadro.sinistra - 5, riquadro.alto + 10,
           f'{riquadro.y_min + riquadro.y_span:.3g}', text_anchor='end')


def _salva_svg(radice, path):
    contenuto = etree.tostring(radice, xml_declaration=True, encoding='UTF-8', pretty_print=True)
    with scrittura_atomica(path, 'wb') as handle:
        handle.write(contenuto)


def emit_phase_svg(trajs, p, path):
    """Ritratto di fase: traiettorie, rette divisorie x = delta/gamma e y = alpha/beta, punti fissi."""
    trajs = list(trajs)
    if not trajs:
        raise ErroreConfigurazione('Il ritratto di fase richiede almeno una traiettoria.')
    x_star, y_star = p.thresholds
    riquadro = _Riquadro(
        *_limiti([t.x for t in trajs], (0.0, x_star)),
        *_limiti([t.y for t in trajs], (0.0, y_star)),
        MARGINE, MARGINE / 2, LARGHEZZA - 1.5 * MARGINE, ALTEZZA - 1.75 * MARGINE,
    )

    radice = _radice_svg(
        f'Ritratto di fase (alpha={p.alpha:g}, beta={p.beta:g}, gamma={p.gamma:g}, delta={p.delta:g})'
    )
    _cornice(radice, riquadro, 'x (prede)', 'y')

    sinistra, destra = riquadro.sinistra, riquadro.sinistra + riquadro.larghezza
    alto, basso = riquadro.alto, riquadro.alto + riquadro.altezza
    _elemento(radice, 'line', class_='divisoria', x1=f'{riquadro.px(x_star):.2f}', y1=f'{alto:.2f}',
              x2=f'{riquadro.px(x_star):.2f}', y2=f'{basso:.2f}', stroke='#999999', stroke_dasharray='6,4')
    _elemento(radice, 'line', class_='divisoria', x1=f'{sinistra:.2f}', y1=f'{riquadro.py(y_star):.2f}',
              x2=f'{destra:.2f}', y2=f'{riquadro.py(y_star):.2f}', stroke='#999999', stroke_dasharray='6,4')

    for k, traj in enumerate(trajs):
        _elemento(radice, 'polyline', class_='traiettoria', fill='none', stroke=COLORI[k % len(COLORI)],
                  stroke_width='1.2', points=riquadro.punti(traj.x, traj.y))

    punti = fixed_points(p)
    for nome, punto in (('origine', punti.origin), ('coesistenza', punti.coexistence)):
        _elemento(radice, 'circle', class_='punto-fisso', id=nome, cx=f'{riquadro.px(punto.x):.2f}',
                  cy=f'{riquadro.py(punto.y):.2f}', r=4, fill='#000000')

    _salva_svg(radice, path)


def emit_timeseries_svg(trajs, path):
    """Oscillazioni x(t) (pannello superiore) e y(t) (pannello inferiore) per ogni traiettoria."""
    trajs = list(trajs)
    if not trajs:
        raise ErroreConfigurazione('Il grafico temporale richiede almeno una traiettoria.')
    limiti_t = _limiti([t.t for t in trajs])
    altezza_pannello = (ALTEZZA - 3 * MARGINE) / 2
    radice = _radice_svg('Andamento nel tempo di prede e predatori')

    for indice_pannello, (attributo, etichetta) in enumerate((('x', 'x (prede)'), ('y', 'y (predatori)'))):
        riquadro = _Riquadro(
            *limiti_t, *_limiti([getattr(t, attributo) for t in trajs]),
            MARGINE, MARGINE / 2 + indice_pannello * (altezza_pannello + MARGINE),
            LARGHEZZA - 1.5 * MARGINE, altezza_pannello,
        )
        pannello = _elemento(radice, 'g', class_=f'pannello-{attributo}')
        _cornice(pannello, riquadro, 't', etichetta)
        for k, traj in enumerate(trajs):
            _elemento(pannello, 'polyline', class_='serie', fill='none', stroke=COLORI[k % len(COLORI)],
                      stroke_width='1.2', points=riquadro.punti(traj.t, getattr(traj, attributo)),
                      data_schema=traj.scheme.value)

    _salva_svg(radice, path)
