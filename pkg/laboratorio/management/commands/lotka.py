from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from sistemi.exceptions import ErroreDominio

from ...esecuzione import run_presets, run_scenario
from ...exceptions import ErroreConfigurazione, ErroreIO
from ...scenari import PRESETS, Analysis, list_presets
from ...serializers import ScenarioSerializer

# Codici di uscita (2 coincide con l'errore d'uso di argparse)
USCITA_CONFIGURAZIONE = 2
USCITA_DIVERGENZA = 3
USCITA_IO = 4

# Valori di default dei flag di scenario: parametri delle figure, h = 0.01, x0 = y0 = 5
DEFAULT_SCENARIO = {
    'name': 'custom',
    'alpha': '1.0',
    'beta': '0.1',
    'gamma': '0.075',
    'delta': '0.75',
    'h': '0.01',
    'phi': 'identity',
    'x0': '5',
    'y0': '5',
    'steps': '1000',
}
FLAG_SCENARIO = ('name', 'scheme', 'alpha', 'beta', 'gamma', 'delta', 'h', 'phi', 'x0', 'y0', 'steps')
FLAG_ANALISI = ('stability', 'direction', 'positivity', 'closure')


def _formatta_errori(errori, prefisso=''):
    """Appiattisce gli errori di un serializer in righe 'campo: messaggio'."""
    righe = []
    if isinstance(errori, dict):
        for campo, valore in errori.items():
            righe += _formatta_errori(valore, f'{prefisso}{campo}.' if prefisso or campo else '')
    elif isinstance(errori, (list, tuple)):
        for valore in errori:
            righe += _formatta_errori(valore, prefisso)
    else:
        righe.append(f'{prefisso.rstrip(".")}: {errori}' if prefisso else str(errori))
    return righe


class Command(BaseCommand):
    help = 'Laboratorio Lotka-Volterra: simulazioni, analisi di consistenza dinamica e preset delle figure.'

    def add_arguments(self, parser):
        comandi = parser.add_subparsers(dest='comando', required=True)

        simula = comandi.add_parser('simulate', help='Simula uno scenario e scrive CSV, SVG e report JSON.')
        self._argomenti_scenario(simula)

        analizza = comandi.add_parser('analyze', help='Come simulate, con le analisi richieste nel report.')
        self._argomenti_scenario(analizza)
        for nome in FLAG_ANALISI:
            analizza.add_argument(f'--{nome}', action='store_true', help=Analysis(nome).label)
        analizza.add_argument('--overlay-ref', dest='overlay_ref',
                              help='Schema di riferimento per la sovrapposizione (solo rk4).')
        analizza.add_argument('--overlay-window', dest='overlay_window',
                              help='Fine della finestra temporale del confronto (default: tutta la simulazione).')
        analizza.add_argument('--overlay-ref-h', dest='overlay_ref_h',
                              help='Passo del riferimento (default: h/100).')

        preset = comandi.add_parser('preset', help='Riproduce uno o piu\' preset delle figure.')
        preset.add_argument('names', nargs='*', help='Nomi dei preset (vedi list-presets).')
        preset.add_argument('--all', action='store_true', help='Esegue tutti i preset.')
        preset.add_argument('--jobs', default='1', help='Preset eseguiti in parallelo (default 1).')
        preset.add_argument('--out', help='Cartella di output (default LV_OUT_DIR).')

        comandi.add_parser('list-presets', help='Elenca i preset disponibili.')

    def _argomenti_scenario(self, parser):
        #Tutti i flag restano stringhe: la validazione passa dal serializer
        parser.add_argument('--name', help='Nome dello scenario (cartella di output).')
        parser.add_argument('--scheme', help='euler | mickens | rk4')
        for nome in ('alpha', 'beta', 'gamma', 'delta'):
            parser.add_argument(f'--{nome}', help=f'Parametro {nome} (> 0).')
        parser.add_argument('--h', help='Passo di integrazione (> 0).')
        parser.add_argument('--phi', help='Funzione denominatore di Mickens: identity | expm1')
        parser.add_argument('--x0', help='Prede iniziali.')
        parser.add_argument('--y0', help='Predatori iniziali.')
        parser.add_argument('--extra-start', dest='extra_start', action='append', metavar='X,Y',
                            help='Condizione iniziale aggiuntiva (ripetibile).')
        parser.add_argument('--steps', help='Numero di passi (>= 1).')
        parser.add_argument('--out', help='Cartella di output (default LV_OUT_DIR).')

    def handle(self, *args, **options):
        comando = options['comando']
        try:
            if comando == 'list-presets':
                self._elenca()
                return
            cartella = Path(options.get('out') or settings.LV_OUT_DIR)
            if comando == 'preset':
                rapporti = self._esegui_preset(options, cartella)
            else:
                scenario = self._scenario(options, analisi=comando == 'analyze')
                rapporti = [run_scenario(scenario, cartella)]
        except ErroreIO as e:
            raise CommandError(str(e), returncode=USCITA_IO)
        except (ErroreConfigurazione, ErroreDominio) as e:
            raise CommandError(str(e), returncode=USCITA_CONFIGURAZIONE)

        for rapporto in rapporti:
            self._riepilogo(rapporto)

        divergenti = [r.scenario.name for r in rapporti if r.diverged]
        if divergenti:
            raise CommandError(
                f'Traiettorie troncate per divergenza in: {", ".join(divergenti)} (output conservati).',
                returncode=USCITA_DIVERGENZA,
            )

    def _elenca(self):
        for sc in list_presets():
            self.stdout.write(f'{sc.name:<26} {sc.scheme.value:<8} h={sc.h.h:<6g} {sc.description}')

    def _esegui_preset(self, options, cartella):
        nomi = sorted(PRESETS) if options['all'] else options['names']
        if not nomi:
            raise ErroreConfigurazione('Indicare almeno un preset oppure --all.')
        try:
            jobs = int(options['jobs'])
        except (TypeError, ValueError):
            raise ErroreConfigurazione(f'--jobs deve essere un intero (ricevuto {options["jobs"]!r}).') from None
        if jobs < 1:
            raise ErroreConfigurazione(f'--jobs deve essere >= 1 (ricevuto {jobs}).')
        return run_presets(nomi, cartella, jobs=jobs)

    def _scenario(self, options, analisi=False):
        dati = dict(DEFAULT_SCENARIO)
        dati.update({nome: options[nome] for nome in FLAG_SCENARIO if options.get(nome) is not None})
        if options.get('extra_start'):
            dati['extra_starts'] = [valore.split(',') for valore in options['extra_start']]

        if analisi:
            dati['analyses'] = [nome for nome in FLAG_ANALISI if options.get(nome)]
            riferimento = options.get('overlay_ref')
            if riferimento is not None:
                if riferimento != 'rk4':
                    raise ErroreConfigurazione(
                        f'overlay-ref: unico riferimento disponibile e\' rk4 (ricevuto {riferimento!r}).'
                    )
                dati['analyses'].append(Analysis.OVERLAY.value)
            for nome in ('overlay_window', 'overlay_ref_h'):
                if options.get(nome) is not None:
                    dati[nome] = options[nome]

        serializer = ScenarioSerializer(data=dati)
        if not serializer.is_valid():
            raise ErroreConfigurazione('Configurazione non valida:\n' + '\n'.join(_formatta_errori(serializer.errors)))
        return serializer.save()

    def _riepilogo(self, rapporto):
        sc = rapporto.scenario
        self.stdout.write(self.style.SUCCESS(f'{sc.name}: report in {rapporto.report_path}'))
        if rapporto.closure:
            verdetti = ', '.join(m.verdict.value for m in rapporto.closure)
            self.stdout.write(f'  chiusura: {verdetti}')
        if rapporto.positivity:
            for indice, pos in enumerate(rapporto.positivity):
                if not pos.is_empty:
                    self.stdout.write(f'  traiettoria {indice + 1}: {pos.negative_variable} < 0 al passo '
                                      f'{pos.first_negative_step}')
        if rapporto.overlay is not None:
            self.stdout.write(f'  sovrapposizione: errore relativo massimo {rapporto.overlay.sup_rel_error:.3%}')
