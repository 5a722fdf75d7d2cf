import math

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from sistemi.exceptions import ErroreDominio
from sistemi.modello import State, first_integral
from sistemi.proprieta import global_error, observed_order
from sistemi.schemi import (
    PHI_DEFAULT, PHI_OPTIONS, PhiFunction, SchemeId, StepSize, euler_step, mickens_closed_form,
    mickens_map, mickens_step, rk4_step, simulate, simulate_ensemble, step_function,
)

from .strategie import PARAMETRI_FIGURE, parametri, passi, stati_positivi

P = PARAMETRI_FIGURE
CINQUE = State(5.0, 5.0)


class StepSizeTest(SimpleTestCase):

    def test_valori_non_validi(self):
        for valore in (0, -0.01, math.inf, math.nan, True, '0.1'):
            with self.subTest(valore=valore):
                with self.assertRaises(ValidationError):
                    StepSize(valore)

    def test_coerce(self):
        h = StepSize(0.5)
        self.assertIs(StepSize.coerce(h), h)
        self.assertEqual(StepSize.coerce(0.25).h, 0.25)


class PhiFunctionTest(SimpleTestCase):

    def test_opzioni_disponibili(self):
        self.assertEqual(set(PHI_OPTIONS), {'identity', 'expm1'})
        self.assertEqual(PHI_DEFAULT(0.01), 0.01)
        self.assertAlmostEqual(PHI_OPTIONS['expm1'](0.01), 1 - math.exp(-0.01), places=15)

    def test_costante_di_consistenza(self):
        self.assertEqual(PHI_OPTIONS['identity'].consistency_constant(), 0.0)
        # 1 - e^(-h) = h - h^2/2 + ...: |phi/h - 1|/h tende a 1/2
        self.assertAlmostEqual(PHI_OPTIONS['expm1'].consistency_constant(), 0.5, places=1)

    def test_rifiuta_phi_non_consistente(self):
        with self.assertRaises(ValidationError):
            PhiFunction('doppio', lambda h: 2 * h)

    def test_rifiuta_phi_non_positiva(self):
        with self.assertRaises(ValidationError):
            PhiFunction('negativa', lambda h: -h)


class EuleroTest(SimpleTestCase):

    def test_un_passo(self):
        s = euler_step(P, 0.02, CINQUE)
        self.assertAlmostEqual(s.x, 5.05, places=12)
        self.assertAlmostEqual(s.y, 4.9625, places=12)

    def test_nessuna_correzione_di_segno(self):
        # passo enorme: la x diventa negativa e resta tale
        s = euler_step(P, 1.0, State(5.0, 30.0))
        self.assertLess(s.x, 0)


class MickensTest(SimpleTestCase):

    def test_un_passo(self):
        s = mickens_step(P, PHI_DEFAULT, 0.01, CINQUE)
        self.assertAlmostEqual(s.x, 5 * 1.02 / 1.015, places=12)
        self.assertAlmostEqual(s.y, 4.98155, places=4)

    def test_rifiuta_ingresso_negativo(self):
        with self.assertRaises(ErroreDominio):
            mickens_step(P, PHI_DEFAULT, 0.01, State(-1.0, 5.0))
        with self.assertRaises(ErroreDominio):
            mickens_closed_form(P, 0.01, State(1.0, -5.0))

    @settings(max_examples=200)
    @given(parametri(), passi(1e-4, 10.0), stati_positivi(1e3))
    def test_preserva_la_positivita(self, p, phi_val, s):
        x, y = mickens_map(p, phi_val, s.x, s.y)
        self.assertGreater(x, 0)
        self.assertGreater(y, 0)

    @given(parametri(), passi(1e-4, 2.0), stati_positivi())
    def test_forma_chiusa_coincide_con_la_sequenziale(self, p, phi_val, s):
        sequenziale = mickens_step(p, PHI_DEFAULT, phi_val, s)
        chiusa = mickens_closed_form(p, phi_val, s)
        assert_allclose(chiusa.as_tuple(), sequenziale.as_tuple(), rtol=1e-12)

    def test_assi_invarianti(self):
        # senza predatori le prede crescono, senza prede i predatori si estinguono
        s = mickens_step(P, PHI_DEFAULT, 0.1, State(5.0, 0.0))
        self.assertGreater(s.x, 5.0)
        self.assertEqual(s.y, 0.0)
        s = mickens_step(P, PHI_DEFAULT, 0.1, State(0.0, 5.0))
        self.assertEqual(s.x, 0.0)
        self.assertLess(s.y, 5.0)


class SimulateTest(SimpleTestCase):

    def test_tempi_e_lunghezza(self):
        traj = simulate(SchemeId.RK4, P, None, 0.01, CINQUE, 100)
        self.assertEqual(len(traj), 101)
        assert_array_equal(traj.steps, np.arange(101))
        assert_array_equal(traj.t, np.arange(101) * 0.01)
        self.assertEqual(traj.initial_state, CINQUE)
        self.assertFalse(traj.diverged)

    def test_zero_passi(self):
        traj = simulate(SchemeId.EULER, P, None, 0.01, CINQUE, 0)
        self.assertEqual(len(traj), 1)
        self.assertEqual(traj.final_state, CINQUE)

    def test_numero_di_passi_non_valido(self):
        for n in (-1, 2.5, True):
            with self.subTest(n=n):
                with self.assertRaises(ErroreDominio):
                    simulate(SchemeId.EULER, P, None, 0.01, CINQUE, n)

    def test_mickens_rifiuta_partenza_negativa(self):
        with self.assertRaises(ErroreDominio):
            simulate(SchemeId.MICKENS, P, None, 0.01, State(-1.0, 1.0), 10)

    def test_coincide_con_i_passi_singoli(self):
        traj = simulate(SchemeId.MICKENS, P, PHI_DEFAULT, 0.01, CINQUE, 5)
        s = CINQUE
        for i in range(1, 6):
            s = mickens_step(P, PHI_DEFAULT, 0.01, s)
            self.assertEqual(traj.state(i), s)
        traj = simulate(SchemeId.RK4, P, None, 0.01, CINQUE, 3)
        self.assertEqual(traj.final_state, rk4_step(P, 0.01, rk4_step(P, 0.01, rk4_step(P, 0.01, CINQUE))))

    def test_troncamento_alla_divergenza(self):
        with self.assertLogs('sistemi.schemi', level='WARNING'):
            traj = simulate(SchemeId.EULER, P, None, 100.0, State(50.0, 50.0), 50)
        self.assertTrue(traj.diverged)
        self.assertLess(traj.truncated_at, 50)
        self.assertEqual(len(traj), traj.truncated_at)
        self.assertTrue(np.all(np.isfinite(traj.x)) and np.all(np.isfinite(traj.y)))

    def test_punti(self):
        traj = simulate(SchemeId.EULER, P, None, 0.02, CINQUE, 2)
        punti = list(traj.points)
        self.assertEqual([i for i, _, _ in punti], [0, 1, 2])
        self.assertEqual(punti[1][2], euler_step(P, 0.02, CINQUE))

    def test_insieme_di_partenze(self):
        partenze = [CINQUE, State(7.0, 7.0), State(3.0, 8.0)]
        traiettorie = simulate_ensemble(SchemeId.RK4, P, None, 0.01, partenze, 10)
        self.assertEqual([t.initial_state for t in traiettorie], partenze)

    def test_step_function(self):
        passo = step_function(SchemeId.EULER, P, None, 0.02)
        assert_allclose(passo(5.0, 5.0), (5.05, 4.9625))
        # lavora anche su array
        x, y = passo(np.array([5.0, 10.0]), np.array([5.0, 10.0]))
        assert_allclose(x, [5.05, 10.0])
        assert_allclose(y, [4.9625, 10.0])


class OrdineDiConvergenzaTest(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        # riferimento comune: RK4 con passo 100 volte piu' piccolo del minimo passo provato
        cls.riferimento = simulate(SchemeId.RK4, P, None, 5e-5, CINQUE, 100000)

    def _ordini(self, scheme, phi=None):
        errori = []
        for h in (0.02, 0.01, 0.005):
            traj = simulate(scheme, P, phi, h, CINQUE, round(5 / h))
            errori.append(global_error(traj, self.riferimento))
        return observed_order(errori)

    def test_eulero_primo_ordine(self):
        for ordine in self._ordini(SchemeId.EULER):
            self.assertTrue(0.8 <= ordine <= 1.2, ordine)

    def test_mickens_primo_ordine_per_entrambe_le_phi(self):
        for nome, phi in PHI_OPTIONS.items():
            with self.subTest(phi=nome):
                for ordine in self._ordini(SchemeId.MICKENS, phi):
                    self.assertTrue(0.8 <= ordine <= 1.2, ordine)

    def test_rk4_quarto_ordine(self):
        riferimento = simulate(SchemeId.RK4, P, None, 1e-4, CINQUE, 10000)
        errori = []
        for h, n in ((0.1, 10), (0.05, 20)):
            finale = simulate(SchemeId.RK4, P, None, h, CINQUE, n).final_state
            errori.append(max(abs(finale.x - riferimento.x[-1]), abs(finale.y - riferimento.y[-1])))
        self.assertTrue(12 <= errori[0] / errori[1] <= 20, errori)

    def test_rk4_conserva_l_integrale_primo(self):
        traj = simulate(SchemeId.RK4, P, None, 1e-3, CINQUE, 20000)
        v0 = first_integral(P, traj.initial_state)
        deriva = max(abs(first_integral(P, traj.state(i)) - v0) for i in range(0, len(traj), 100))
        self.assertLess(deriva / abs(v0), 1e-6)


class ResiduiPuntiFissiTest(SimpleTestCase):

    @given(parametri(), passi(1e-3, 1.0), st.sampled_from(list(SchemeId)))
    def test_punti_fissi_comuni_agli_schemi(self, p, h, scheme):
        passo = step_function(scheme, p, PHI_DEFAULT, h)
        for x, y in ((0.0, 0.0), p.thresholds):
            x_nuovo, y_nuovo = passo(x, y)
            scala = max(1.0, x, y)
            self.assertLess(max(abs(x_nuovo - x), abs(y_nuovo - y)), 1e-13 * scala)
