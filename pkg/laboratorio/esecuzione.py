import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from django.conf import settings

from sistemi.proprieta import (
    compare_overlay, direction_summary, measure_closure, monitor_positivity, system_kind_for,
)
from sistemi.schemi import SchemeId, simulate, simulate_ensemble
from sistemi.stabilita import SystemKind, stability_reports

from .exceptions import ErroreIO
from .report import emit_csv, emit_phase_svg, emit_report_json, emit_timeseries_svg
from .scenari import Analysis, RunReport, get_preset

logger = logging.getLogger(__name__)


def stability_for(sc):
    """Punti fissi classificati per il sistema continuo e, se discreto, per lo schema dello scenario."""
    rapporti = stability_reports(SystemKind.CONTINUOUS, sc.params)
    tipo = system_kind_for(sc.scheme)
    if tipo != SystemKind.CONTINUOUS:
        rapporti += stability_reports(tipo, sc.params, h=sc.h, phi=sc.phi)
    return rapporti


def _nome_traiettoria(indice):
    return 'trajectory.csv' if indice == 0 else f'trajectory-{indice + 1}.csv'


def run_scenario(sc, out_dir):
    """Simula lo scenario, esegue le analisi richieste e scrive CSV, SVG e report JSON in <out_dir>/<nome>/."""
    inizio = time.perf_counter()
    cartella = Path(out_dir) / sc.name
    try:
        cartella.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ErroreIO(f'Impossibile creare la cartella {cartella}: {e}') from e

    logger.info(f'Scenario {sc.name}: schema {sc.scheme.value}, h={sc.h.h}, {sc.n_steps} passi, '
                f'{len(sc.starts)} partenze')
    traiettorie = simulate_ensemble(sc.scheme, sc.params, sc.phi, sc.h, sc.starts, sc.n_steps)
    principale = traiettorie[0]

    analisi = {}
    if sc.requires(Analysis.STABILITY):
        analisi['stability'] = stability_for(sc)
    if sc.requires(Analysis.DIRECTION):
        analisi['direction'] = [direction_summary(t) for t in traiettorie]
    if sc.requires(Analysis.POSITIVITY):
        analisi['positivity'] = [monitor_positivity(t) for t in traiettorie]
    if sc.requires(Analysis.CLOSURE):
        analisi['closure'] = [measure_closure(t) for t in traiettorie]

    riferimento = None
    if sc.requires(Analysis.OVERLAY):
        riferimento = simulate(SchemeId.RK4, sc.params, None, sc.reference_h, sc.start, sc.reference_steps)
        analisi['overlay'] = compare_overlay(principale, riferimento, tolerance=settings.LV_OVERLAY_TOLERANCE)
        if not analisi['overlay'].within_tolerance:
            logger.warning(f'Scenario {sc.name}: errore di sovrapposizione {analisi["overlay"].sup_rel_error:.3%} '
                           f'oltre la tolleranza {settings.LV_OVERLAY_TOLERANCE:.0%}')

    scritti = []
    try:
        percorsi = []
        for indice, traj in enumerate(traiettorie):
            percorso = cartella / _nome_traiettoria(indice)
            emit_csv(traj, percorso)
            scritti.append(percorso)
            percorsi.append(percorso.name)

        fase = cartella / 'phase.svg'
        emit_phase_svg(traiettorie, sc.params, fase)
        scritti.append(fase)

        serie = cartella / 'timeseries.svg'
        emit_timeseries_svg(traiettorie + ([riferimento] if riferimento is not None else []), serie)
        scritti.append(serie)

        percorso_report = cartella / 'report.json'
        rapporto = RunReport(
            scenario=sc,
            tool_version=settings.LV_TOOL_VERSION,
            trajectory_paths=percorsi,
            phase_svg=fase.name,
            timeseries_svg=serie.name,
            truncations=[t.truncated_at for t in traiettorie],
            wall_clock_seconds=round(time.perf_counter() - inizio, 6),
            report_path=str(percorso_report),
            **analisi,
        )
        emit_report_json(rapporto, percorso_report)
    except ErroreIO:
        # niente output a meta': si rimuove quanto gia' scritto in questa corsa
        for percorso in scritti:
            percorso.unlink(missing_ok=True)
        raise

    logger.debug(f'Scenario {sc.name} completato in {rapporto.wall_clock_seconds:.3f} s')
    if rapporto.diverged:
        logger.warning(f'Scenario {sc.name}: traiettorie troncate per divergenza {rapporto.truncations}')
    return rapporto


def run_presets(names, out_dir, jobs=1):
    """Esegue piu' preset, in sequenza o su un pool di thread; ogni preset scrive nella propria cartella."""
    scenari = [get_preset(nome) for nome in names]
    if jobs <= 1 or len(scenari) <= 1:
        return [run_scenario(sc, out_dir) for sc in scenari]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda sc: run_scenario(sc, out_dir), scenari))
