import cmath
import math

import numpy as np
from django.test import SimpleTestCase

from apps.exceptions import DomainError
from apps.integrator.services import integrator_service
from apps.profiles.services import FrequencyProfile

from .services import PowerSolutionParams, analytic_service as an


def _phase_gap(a: float, b: float) -> float:
    return abs(cmath.phase(cmath.exp(1j * (a - b))))


def _envelope(nu: float, g0: float, beta: float) -> float:
    return max(abs(an.rho_of_g(nu, g) - beta) for g in np.linspace(g0, g0 + math.pi, 64))


class PowerSolutionParamsTests(SimpleTestCase):

    def test_derived_quantities(self):
        params = PowerSolutionParams(n=2.0, G=1000.0)
        self.assertEqual(params.nu, 0.25)
        self.assertEqual(params.gamma_exp, 2.0)
        self.assertEqual(params.g, 500.0)
        self.assertAlmostEqual(params.gamma_exp * 2 * params.nu, 1.0, places=15)

    def test_from_nu_g(self):
        params = PowerSolutionParams.from_nu_g(1.0 / 3.0, 10.0)
        self.assertAlmostEqual(params.n, 1.0, places=14)
        self.assertAlmostEqual(params.g, 10.0, places=12)

    def test_rejects_bad_parameters(self):
        with self.assertRaises(DomainError):
            PowerSolutionParams(n=-1.0, G=1.0)
        with self.assertRaises(DomainError):
            PowerSolutionParams.from_nu_g(0.6, 1.0)


class BesselSolutionTests(SimpleTestCase):

    def test_initial_conditions(self):
        for n in (0.5, 1.0, 2.0, 4.0):
            for G in (0.3, 5.0, 40.0):
                mode = an.epsilon_power(PowerSolutionParams(n, G), -1.0)
                self.assertAlmostEqual(abs(mode.eps - 1.0), 0.0, delta=1e-9, msg=(n, G))
                self.assertAlmostEqual(abs(mode.deps - 1j), 0.0, delta=1e-9, msg=(n, G))

    def test_coefficient_continuity(self):
        c = an.bessel_coefficients(PowerSolutionParams(2.0, 10.0))
        self.assertEqual(c.B_plus, c.B_minus)
        self.assertEqual(c.A_plus, -c.A_minus)

    def test_wronskian_on_grid(self):
        for n in (0.5, 1.0, 2.0, 4.0, 8.0):
            for g in (0.1, 0.5, 1.0, 5.0, 10.0):
                nu = 1.0 / (n + 2.0)
                params = PowerSolutionParams(n, g / (2.0 * nu))
                for T in (-0.5, 0.5):
                    mode = an.epsilon_power(params, T)
                    scale = max(1.0, abs(mode.eps) * abs(mode.deps))
                    self.assertLessEqual(mode.wronskian_residual, 1e-10 * scale, msg=(n, g, T))

    def test_continuity_at_crossing(self):
        params = PowerSolutionParams(2.0, 10.0)
        at_zero = an.epsilon_power(params, 0.0)
        for T in (-1e-9, 1e-9):
            near = an.epsilon_power(params, T)
            self.assertAlmostEqual(abs(near.eps - at_zero.eps), 0.0, delta=1e-6)
            self.assertAlmostEqual(abs(near.deps - at_zero.deps), 0.0, delta=1e-6)

    def test_large_g_coefficients(self):
        params = PowerSolutionParams.from_nu_g(0.25, 500.0)
        exact = an.bessel_coefficients(params)
        asymptotic = an.asymptotic_coefficients(params)
        modulus = math.sqrt(0.25 * math.pi) / math.sin(0.25 * math.pi)
        self.assertAlmostEqual(abs(exact.A_minus), modulus, delta=0.01 * modulus)
        self.assertLess(_phase_gap(cmath.phase(exact.A_minus), cmath.phase(asymptotic.A_minus)), 0.01)
        self.assertLess(_phase_gap(cmath.phase(exact.B_minus), 500.0 - 0.125 * math.pi + 0.25 * math.pi), 0.01)

    def test_rejects_time_outside_window(self):
        with self.assertRaises(DomainError):
            an.epsilon_power(PowerSolutionParams(2.0, 1.0), 1.5)


class OracleEquivalenceTests(SimpleTestCase):
    """수치 적분과 정확한 해의 비교"""

    def test_mode_and_energy_curve(self):
        samples = np.linspace(-1.0, 1.0, 21)
        for n in (0.5, 1.0, 2.0, 4.0):
            profile = FrequencyProfile.power(n)
            for g in (0.1, 1.0, 10.0):
                nu = 1.0 / (n + 2.0)
                params = PowerSolutionParams(n, g / (2.0 * nu))
                coefficients = an.bessel_coefficients(params)
                series = integrator_service.integrate_mode(
                    profile, params.G, 1.0, rel_tol=1e-12, samples=samples,
                )
                numeric_R = []
                analytic_R = []
                for state in series.states:
                    exact = an.epsilon_power(params, state.T, coefficients)
                    self.assertLessEqual(
                        abs(state.eps - exact.eps), 1e-6 * abs(exact.eps), msg=(n, g, state.T),
                    )
                    f = abs(state.T) ** n
                    numeric_R.append((f * abs(state.eps) ** 2 + abs(state.deps) ** 2) / 2.0)
                    analytic_R.append(an.energy_ratio_curve(params, state.T))
                scale = max(analytic_R)
                gap = max(abs(a - b) for a, b in zip(numeric_R, analytic_R))
                self.assertLessEqual(gap, 1e-6 * scale, msg=(n, g))


class EnergyCurveTests(SimpleTestCase):

    def test_start_of_window(self):
        for n in (0.5, 2.0, 4.0):
            for g in (0.1, 1.0, 10.0, 100.0):
                params = PowerSolutionParams.from_nu_g(1.0 / (n + 2.0), g)
                self.assertAlmostEqual(an.energy_ratio_curve(params, -1.0), 1.0, delta=1e-10, msg=(n, g))

    def test_instantaneous_jump_limit(self):
        params = PowerSolutionParams.from_nu_g(0.25, 1e-3)
        for T in (-0.7, 0.7):
            self.assertAlmostEqual(an.energy_ratio_curve(params, T), (1 + 0.7 ** 2) / 2, delta=1e-3)

    def test_symmetric_in_sudden_limit(self):
        params = PowerSolutionParams.from_nu_g(0.25, 1e-3)
        for T in (0.2, 0.35, 0.5):
            self.assertAlmostEqual(
                an.energy_ratio_curve(params, T), an.energy_ratio_curve(params, -T), delta=1e-6,
            )

    def test_crossing_value(self):
        params = PowerSolutionParams.from_nu_g(0.25, 10.0)
        mode = an.epsilon_power(params, 0.0)
        self.assertAlmostEqual(an.energy_ratio_curve(params, 0.0), abs(mode.deps) ** 2 / 2, delta=1e-12)

    def test_crossing_value_for_large_g(self):
        for nu in (0.25, 1.0 / 3.0):
            g = 1e4
            exact = an.r_at_crossing(PowerSolutionParams.from_nu_g(nu, g))
            self.assertAlmostEqual(an.r_at_crossing_asymptotic(nu, g), exact, delta=1e-3 * exact)

    def test_validity_floor(self):
        self.assertAlmostEqual(an.adiabatic_validity_floor(0.25, 100.0), 0.1, places=15)


class AmplificationTests(SimpleTestCase):

    def test_beta_values(self):
        self.assertAlmostEqual(an.beta_single(1.0), 5.0 / 3.0, places=14)
        self.assertAlmostEqual(an.beta_single(2.0), 3.0, places=14)
        self.assertAlmostEqual(an.beta_single(4.0), 7.0, places=13)

    def test_beta_limits(self):
        self.assertAlmostEqual(an.beta_single(1e-4), 1.0, delta=1e-7)
        self.assertAlmostEqual(an.beta_single(100.0), an.beta_asymptotics(100.0)["large_n"], delta=0.05 * an.beta_single(100.0))

    def test_beta_matches_pair(self):
        for n in (0.3, 1.0, 2.0, 4.0, 9.0):
            pair = an.u_pair_single(n)
            self.assertAlmostEqual(an.beta_single(n), 1 + 2 * abs(pair.u_minus) ** 2, delta=1e-12 * an.beta_single(n))
            self.assertLessEqual(pair.invariant_residual, 1e-12)

    def test_rho_near_beta(self):
        self.assertAlmostEqual(an.rho_of_g(0.25, 100.0), 3.0, delta=0.03)
        self.assertAlmostEqual(an.rho_of_g(1.0 / 6.0, 200.0), 7.0, delta=0.07)
        self.assertAlmostEqual(an.rho_of_g(1.0 / 3.0, 1e4), 5.0 / 3.0, delta=1e-3)

    def test_rho_within_one_percent_above_hundred(self):
        for nu in (1.0 / 3.0, 0.25, 1.0 / 6.0):
            beta = an.beta_single(1.0 / nu - 2.0)
            self.assertLessEqual(abs(an.rho_of_g(nu, 100.0) / beta - 1.0), 0.01, msg=nu)

    def test_rho_converges(self):
        for nu in (1.0 / 3.0, 0.25, 1.0 / 6.0):
            beta = an.beta_single(1.0 / nu - 2.0)
            envelopes = [_envelope(nu, g0, beta) for g0 in (1e2, 1e3, 1e4)]
            self.assertGreater(envelopes[0], envelopes[1])
            self.assertGreater(envelopes[1], envelopes[2])

    def test_rho_is_final_energy_ratio(self):
        params = PowerSolutionParams.from_nu_g(0.25, 7.0)
        self.assertAlmostEqual(an.rho_of_g(0.25, 7.0), an.energy_ratio_curve(params, 1.0), delta=1e-12)


class TanhProfileTests(SimpleTestCase):

    def test_quarter(self):
        v = an.tanh_v_minus(0.25)
        self.assertAlmostEqual(abs(v) ** 2, 1 / math.sinh(math.pi / 2) ** 2, places=14)
        self.assertAlmostEqual(abs(v) ** 2, 0.18883, places=5)

    def test_continuous_at_quarter(self):
        below = abs(an.tanh_v_minus(0.25 - 1e-9))
        above = abs(an.tanh_v_minus(0.25 + 1e-9))
        self.assertAlmostEqual(below, above, delta=1e-7)

    def test_large_omega_tends_to_one(self):
        self.assertAlmostEqual(abs(an.tanh_v_minus(3.0)), math.exp(-math.pi / 48), delta=1e-3)
        self.assertAlmostEqual(abs(an.tanh_v_minus(500.0)), 1.0, delta=1e-3)

    def test_log_form_is_seamless(self):
        w = 20.0 / (2.0 * math.pi)
        direct = math.cosh(math.pi * math.sqrt(4 * w * w - 0.25)) / math.sinh(2 * math.pi * w)
        self.assertAlmostEqual(abs(an.tanh_v_minus(w * (1 + 1e-12))), direct, delta=1e-10)

    def test_pair_constraint(self):
        for w in (0.1, 0.25, 1.0, 4.0, 50.0):
            pair = an.tanh_pair_adiabatic(w)
            self.assertLessEqual(pair.invariant_residual, 1e-12, msg=w)

    def test_zero_rejected(self):
        with self.assertRaises(DomainError):
            an.tanh_v_minus(0.0)

    def test_numeric_integration_reproduces_closed_form(self):
        omega_tilde, G = 4.0, 200.0
        profile = FrequencyProfile.from_omega_tilde(omega_tilde, G)
        series = integrator_service.integrate_mode(profile, G, 1.0, rel_tol=1e-12, samples=[1.0])
        pair = integrator_service.extract_bogoliubov_at(series, 1.0)
        expected = abs(an.tanh_v_minus(omega_tilde))
        self.assertAlmostEqual(abs(pair.u_minus), expected, delta=0.005 * expected)
