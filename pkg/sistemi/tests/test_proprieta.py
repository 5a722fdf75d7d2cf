import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from sistemi.exceptions import ErroreDominio
from sistemi.modello import ModelParams, State
from sistemi.proprieta import (
    SOGLIA_DERIVA, ExitCase, PositivityReport, RegionId, Verdict, check_direction, classify_region,
    compare_overlay, direction_summary, global_error, measure_closure, monitor_positivity, observed_order,
)
from sistemi.schemi import PHI_DEFAULT, SchemeId, StepSize, Trajectory, simulate
from sistemi.stabilita import SystemKind

from .strategie import PARAMETRI_FIGURE

P = PARAMETRI_FIGURE
CINQUE = State(5.0, 5.0)


def _traiettoria(punti, scheme=SchemeId.EULER, h=0.03):
    """Traiettoria costruita a mano, per provare i rilevatori su casi piccoli."""
    xs, ys = (np.array(v, dtype=float) for v in zip(*punti))
    passi = np.arange(len(punti))
    return Trajectory(scheme=scheme, params=P, h=StepSize(h), steps=passi, t=passi * h, x=xs, y=ys)


class RegioniTest(SimpleTestCase):

    def test_classificazione(self):
        casi = {
            (15, 15): RegionId.I,
            (5, 15): RegionId.II,
            (5, 5): RegionId.III,
            (15, 5): RegionId.IV,
            (10, 5): RegionId.BOUNDARY_X,
            (5, 10): RegionId.BOUNDARY_Y,
            (0, 5): RegionId.EXTERIOR,
            (-1, 5): RegionId.EXTERIOR,
            (5, -3): RegionId.EXTERIOR,
        }
        for (x, y), atteso in casi.items():
            with self.subTest(punto=(x, y)):
                self.assertEqual(classify_region(P, State(x, y)), atteso)

    def test_direzione_per_regione(self):
        attesi = {(15, 15): (-1, 1), (5, 15): (-1, -1), (5, 5): (1, -1), (15, 5): (1, 1)}
        for (x, y), segni in attesi.items():
            with self.subTest(punto=(x, y)):
                continuo = check_direction(SystemKind.CONTINUOUS, P, State(x, y))
                self.assertEqual((continuo.dx_sign, continuo.dy_sign), segni)
                self.assertTrue(continuo.conforms)
                self.assertTrue(check_direction(SystemKind.EULER, P, State(x, y), h=0.5).conforms)
                self.assertTrue(check_direction(SystemKind.MICKENS, P, State(x, y), phi_val=0.5).conforms)

    def test_mickens_usa_la_x_aggiornata(self):
        # regione III appena a sinistra di x = delta/gamma: la x aggiornata supera la soglia e y cresce
        s = State(9.999, 1.0)
        esito = check_direction(SystemKind.MICKENS, P, s, phi_val=0.1)
        self.assertEqual(esito.region, RegionId.III)
        self.assertEqual(esito.dy_sign, 1)
        self.assertTrue(esito.conforms)

    def test_stato_non_interno(self):
        with self.assertRaises(ErroreDominio):
            check_direction(SystemKind.CONTINUOUS, P, State(10.0, 3.0))
        with self.assertRaises(ErroreDominio):
            check_direction(SystemKind.EULER, P, State(-1.0, 3.0), h=0.01)

    def test_passo_come_step_size(self):
        for s in (State(15, 15), State(5, 15), State(5, 5), State(15, 5)):
            with self.subTest(s=s):
                self.assertEqual(check_direction(SystemKind.EULER, P, s, h=StepSize(0.5)),
                                 check_direction(SystemKind.EULER, P, s, h=0.5))

    def test_riepilogo_su_traiettorie(self):
        for scheme, h in ((SchemeId.RK4, 0.01), (SchemeId.EULER, 0.02), (SchemeId.MICKENS, 0.01)):
            with self.subTest(scheme=scheme):
                riepilogo = direction_summary(simulate(scheme, P, PHI_DEFAULT, h, CINQUE, 2000))
                self.assertEqual(riepilogo.violations, 0)
                self.assertEqual(riepilogo.checked + riepilogo.skipped, 2001)
                self.assertGreater(riepilogo.checked, 1900)


class PositivitaTest(SimpleTestCase):

    def test_traiettoria_positiva(self):
        rapporto = monitor_positivity(_traiettoria([(5, 5), (6, 4), (7, 3)]))
        self.assertTrue(rapporto.is_empty)
        self.assertIsNone(rapporto.exit_case)

    def test_uscita_dalla_regione_II(self):
        rapporto = monitor_positivity(_traiettoria([(5, 15), (-1, 14), (-0.5, 12), (2, 11)]))
        self.assertEqual(rapporto.first_negative_step, 1)
        self.assertEqual(rapporto.negative_variable, 'x')
        self.assertEqual(rapporto.recovered_positive_step, 3)
        self.assertEqual(rapporto.exit_case, ExitCase.REGION_II_X)

    def test_uscita_dalla_regione_III(self):
        rapporto = monitor_positivity(_traiettoria([(4, 6), (3, 2), (3, -1)]))
        self.assertEqual(rapporto.first_negative_step, 2)
        self.assertEqual(rapporto.negative_variable, 'y')
        self.assertIsNone(rapporto.recovered_positive_step)
        self.assertEqual(rapporto.exit_case, ExitCase.REGION_III_Y)

    def test_caso_di_uscita_non_previsto(self):
        # x negativa partendo dalla regione I: nessuno dei due casi
        rapporto = monitor_positivity(_traiettoria([(15, 15), (-1, 16)]))
        self.assertEqual(rapporto.negative_variable, 'x')
        self.assertIsNone(rapporto.exit_case)

    def test_partenza_negativa(self):
        rapporto = monitor_positivity(_traiettoria([(-1, 5), (2, 5)]))
        self.assertEqual(rapporto.first_negative_step, 0)
        self.assertIsNone(rapporto.exit_case)

    def test_mickens_resta_positivo(self):
        traj = simulate(SchemeId.MICKENS, P, PHI_DEFAULT, 0.5, State(40.0, 0.5), 2000)
        self.assertTrue(monitor_positivity(traj).is_empty)

    def test_eulero_con_passo_grande_diventa_negativo(self):
        # h = 0.03, x0 = y0 = 5: le prede diventano negative e poi tornano positive
        traj = simulate(SchemeId.EULER, P, None, 0.03, CINQUE, 10000)
        rapporto = monitor_positivity(traj)
        self.assertFalse(rapporto.is_empty)
        self.assertEqual(rapporto.negative_variable, 'x')
        self.assertIsNotNone(rapporto.recovered_positive_step)
        self.assertGreater(rapporto.recovered_positive_step, rapporto.first_negative_step)

    def test_eulero_con_passo_0_02_resta_positivo(self):
        traj = simulate(SchemeId.EULER, P, None, 0.02, CINQUE, 10000)
        self.assertFalse(traj.diverged)
        # scansione punto per punto, indipendente da monitor_positivity
        negativi = [i for i, (x, y) in enumerate(zip(traj.x, traj.y)) if x < 0 or y < 0]
        self.assertEqual(negativi, [])
        self.assertEqual(monitor_positivity(traj), PositivityReport())


class ChiusuraTest(SimpleTestCase):

    def test_rk4_orbita_chiusa_in_senso_antiorario(self):
        metriche = measure_closure(simulate(SchemeId.RK4, P, None, 0.01, CINQUE, 4000))
        self.assertEqual(metriche.verdict, Verdict.CLOSED)
        self.assertGreaterEqual(len(metriche.crossings), 3)
        self.assertTrue(metriche.counterclockwise)
        self.assertLess(abs(metriche.v_drift), 1e-4)
        self.assertTrue(all(x > 10 for x in metriche.crossings))
        self.assertTrue(all(t2 > t1 for t1, t2 in zip(metriche.crossing_times, metriche.crossing_times[1:])))

    def test_eulero_spirale_verso_l_esterno(self):
        metriche = measure_closure(simulate(SchemeId.EULER, P, None, 0.02, CINQUE, 3500))
        self.assertEqual(metriche.verdict, Verdict.SPIRAL_OUT)
        self.assertGreaterEqual(len(metriche.crossings), 5)
        for prima, dopo in zip(metriche.crossings, metriche.crossings[1:]):
            self.assertGreater(dopo, 1.001 * prima)
        self.assertGreater(metriche.v_drift, 0)

    def test_mickens_orbita_chiusa_e_positiva(self):
        traj = simulate(SchemeId.MICKENS, P, PHI_DEFAULT, 0.01, CINQUE, 100000)
        self.assertTrue(np.all(traj.x > 0) and np.all(traj.y > 0))
        metriche = measure_closure(traj)
        self.assertEqual(metriche.verdict, Verdict.CLOSED)
        self.assertTrue(all(abs(d) < SOGLIA_DERIVA for d in metriche.drift_per_period))

    def test_mickens_dieci_periodi(self):
        metriche = measure_closure(simulate(SchemeId.MICKENS, P, PHI_DEFAULT, 0.01, CINQUE, 12000))
        self.assertGreaterEqual(len(metriche.crossings), 11)
        self.assertTrue(metriche.counterclockwise)
        self.assertLess(abs(metriche.v_drift), 0.01)
        primo, undicesimo = metriche.v_at_crossings[0], metriche.v_at_crossings[10]
        self.assertLess(abs(undicesimo - primo) / abs(primo), 0.01)

    def test_rotazione_oraria_tra_due_attraversamenti(self):
        # due attraversamenti verso l'alto, ma in mezzo l'angolo torna indietro da (5, 15) a (10, 16)
        punti = [(14.0, 9.0), (14.0, 11.0), (5.0, 15.0), (10.0, 16.0), (5.0, 5.0), (14.0, 9.0), (14.0, 11.0)]
        metriche = measure_closure(_traiettoria(punti, scheme=SchemeId.RK4))
        self.assertEqual(len(metriche.crossings), 2)
        self.assertFalse(metriche.counterclockwise)

    def test_pochi_attraversamenti(self):
        metriche = measure_closure(simulate(SchemeId.RK4, P, None, 0.01, CINQUE, 500))
        self.assertEqual(metriche.verdict, Verdict.INCONCLUSIVE)
        self.assertEqual(metriche.drift_per_period, [])
        self.assertIsNone(metriche.v_drift)

    def test_verdetto_spirale_interna(self):
        # attraversamenti artificiali sempre piu' vicini al centro
        punti = []
        for raggio in (8.0, 6.0, 4.5, 3.5):
            punti += [(10 + raggio, 9.0), (10 + raggio, 11.0), (5.0, 15.0), (5.0, 5.0)]
        metriche = measure_closure(_traiettoria(punti, scheme=SchemeId.RK4))
        self.assertEqual(metriche.verdict, Verdict.SPIRAL_IN)
        assert_allclose(metriche.crossings, [18.0, 16.0, 14.5, 13.5])

    def test_partenze_degeneri(self):
        with self.assertRaises(ErroreDominio):
            measure_closure(_traiettoria([(10.0, 10.0), (10.0, 10.0)]))
        with self.assertRaises(ErroreDominio):
            measure_closure(_traiettoria([(-1.0, 5.0), (2.0, 5.0)]))


class SovrapposizioneTest(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.riferimento = simulate(SchemeId.RK4, P, None, 1e-4, CINQUE, 200000)

    def test_mickens_entro_la_tolleranza_con_passo_piccolo(self):
        mickens = simulate(SchemeId.MICKENS, P, PHI_DEFAULT, 0.001, CINQUE, 20000)
        risultato = compare_overlay(mickens, self.riferimento)
        self.assertLess(risultato.sup_rel_error, 0.05)
        self.assertTrue(risultato.within_tolerance)
        self.assertAlmostEqual(float(risultato.times[-1]), 20.0, places=6)

    def test_errore_decresce_col_passo(self):
        errori = [
            compare_overlay(simulate(SchemeId.MICKENS, P, PHI_DEFAULT, h, CINQUE, round(20 / h)),
                            self.riferimento).sup_rel_error
            for h in (0.01, 0.005, 0.0025)
        ]
        self.assertTrue(errori[0] > errori[1] > errori[2], errori)

    def test_errore_di_eulero_cresce_nel_tempo(self):
        risultato = compare_overlay(simulate(SchemeId.EULER, P, None, 0.02, CINQUE, 1000), self.riferimento)
        primi = risultato.times <= 10
        self.assertGreater(np.max(risultato.error_x[~primi]), np.max(risultato.error_x[primi]))

    def test_traiettoria_con_se_stessa(self):
        traj = simulate(SchemeId.MICKENS, P, PHI_DEFAULT, 0.01, CINQUE, 2000)
        risultato = compare_overlay(traj, traj)
        self.assertEqual(risultato.sup_rel_error, 0.0)
        self.assertEqual(float(np.max(risultato.error_y)), 0.0)

    def test_eulero_si_allontana_piu_di_mickens(self):
        # su una finestra lunga la spirale di Eulero supera l'ampiezza dell'orbita di riferimento
        riferimento = simulate(SchemeId.RK4, P, None, 1e-3, CINQUE, 200000)
        eulero = compare_overlay(simulate(SchemeId.EULER, P, None, 0.02, CINQUE, 10000), riferimento)
        mickens = compare_overlay(simulate(SchemeId.MICKENS, P, PHI_DEFAULT, 0.01, CINQUE, 20000), riferimento)
        self.assertGreater(eulero.sup_rel_error, mickens.sup_rel_error)
        self.assertFalse(eulero.within_tolerance)

    def test_finestra_limitata_dalla_traiettoria_piu_corta(self):
        breve = simulate(SchemeId.MICKENS, P, PHI_DEFAULT, 0.01, CINQUE, 500)
        risultato = compare_overlay(breve, self.riferimento)
        self.assertAlmostEqual(float(risultato.times[-1]), 5.0, places=9)
        self.assertEqual(len(risultato.times), 501)

    def test_traiettorie_incompatibili(self):
        altra = simulate(SchemeId.RK4, ModelParams(1.0, 0.1, 0.075, 0.5), None, 0.01, CINQUE, 10)
        with self.assertRaises(ErroreDominio):
            compare_overlay(altra, self.riferimento)
        spostata = simulate(SchemeId.RK4, P, None, 0.01, State(6.0, 5.0), 10)
        with self.assertRaises(ErroreDominio):
            compare_overlay(spostata, self.riferimento)

    def test_errore_globale_e_ordine(self):
        traj = simulate(SchemeId.RK4, P, None, 1e-4, CINQUE, 100)
        self.assertEqual(global_error(traj, self.riferimento), 0.0)
        assert_allclose(observed_order([4.0, 2.0, 1.0]), [1.0, 1.0])
