import cmath
import math
from unittest import mock

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase

from apps.exceptions import DomainError, NumericalFailure
from apps.profiles.services import FrequencyProfile

from .services import (
    BogoliubovPair,
    ModeSeries,
    ModeState,
    integrator_service as integ,
)
from .tasks import evaluate_phase_point_task

POWER2 = FrequencyProfile.power(2)


class ClassicalIntegrationTests(SimpleTestCase):

    def test_initial_conditions(self):
        series = integ.integrate_classical(POWER2, 10.0, 0.7, 0.5)
        first = series.states[0]
        self.assertEqual(first.T, -1.0)
        self.assertAlmostEqual(first.X, math.cos(0.7), places=12)
        self.assertAlmostEqual(first.dXdT, 10.0 * math.sin(0.7), places=10)

    def test_energy_ratio_is_one_at_start(self):
        for phi in (0.0, 1.0, 2.5, 5.9):
            series = integ.integrate_classical(POWER2, 3.0, phi, 0.0)
            self.assertAlmostEqual(integ.energy_ratio(POWER2, 3.0, series.states[0]), 1.0, places=12)

    def test_rejects_bad_arguments(self):
        with self.assertRaises(DomainError):
            integ.integrate_classical(POWER2, 0.0, 0.0, 1.0)
        with self.assertRaises(DomainError):
            integ.integrate_classical(POWER2, 10.0, 0.0, -1.0)
        with self.assertRaises(DomainError):
            integ.integrate_classical(POWER2, 10.0, 0.0, 1.0, rel_tol=1e-3)

    def test_superposition_matches_direct_trajectory(self):
        G, phi = 20.0, 0.3
        samples = np.linspace(-1.0, 1.0, 41)
        direct = integ.integrate_classical(POWER2, G, phi, 1.0, rel_tol=1e-12, samples=samples)
        basis = integ.basis_trajectories(POWER2, G, 1.0, rel_tol=1e-12)
        for state in direct.states:
            xc, xs, _, _ = basis(state.T)
            combined = math.cos(phi) * xc + math.sin(phi) * xs
            self.assertAlmostEqual(state.X, combined, delta=1e-10 * max(1.0, abs(combined)))

    def test_global_error_estimate(self):
        estimate = integ.global_error_estimate(POWER2, 20.0, 0.4, 1.0, rel_tol=1e-8)
        self.assertLessEqual(estimate, 1e-7)

    def test_crossing_is_a_mesh_point(self):
        solution = integ.basis_trajectories(FrequencyProfile.sin2(), 5.0, 3.0)
        self.assertEqual(solution.breaks, [-1.0, 0.0, 2.0, 3.0])


class PhaseEnsembleTests(SimpleTestCase):

    def test_pre_crossing_adiabatic_invariant(self):
        for n in (0.5, 2.0, 4.0):
            profile = FrequencyProfile.power(n)
            ensemble = integ.phase_ensemble(profile, 1000.0, -0.5, 360)
            expected = 0.5 ** (n / 2)
            self.assertLessEqual(np.max(np.abs(ensemble.R / expected - 1.0)), 0.01, msg=n)

    def test_spread_negligible_when_adiabatic(self):
        ensemble = integ.phase_ensemble(POWER2, 1000.0, -0.5, 360)
        self.assertLessEqual(ensemble.max - ensemble.min, 0.02 * ensemble.mean)

    def test_spread_large_when_sudden(self):
        ensemble = integ.phase_ensemble(POWER2, 1.0, -0.5, 360)
        self.assertGreater(ensemble.max - ensemble.min, 0.2)

    def test_mean_after_crossing(self):
        for n, beta in ((1.0, 5.0 / 3.0), (2.0, 3.0), (4.0, 7.0)):
            ensemble = integ.phase_ensemble(FrequencyProfile.power(n), 1000.0, 1.0, 360)
            self.assertAlmostEqual(ensemble.mean, beta, delta=0.02 * beta, msg=n)

    def test_oscillations_after_crossing(self):
        ensemble = integ.phase_ensemble(POWER2, 1000.0, 1.0, 360)
        self.assertGreater(ensemble.max - ensemble.min, 0.5 * ensemble.mean)

    def test_tanh_family_matches_power(self):
        power = integ.phase_ensemble(POWER2, 1000.0, 1.0, 360)
        tanh = integ.phase_ensemble(FrequencyProfile.tanh_power(2, 5), 1000.0, 1.0, 360)
        self.assertAlmostEqual(tanh.mean, power.mean, delta=0.01 * power.mean)

    def test_direct_strategy_agrees(self):
        fast = integ.phase_ensemble(POWER2, 30.0, 0.8, 16, rel_tol=1e-12)
        slow = integ.phase_ensemble(POWER2, 30.0, 0.8, 16, rel_tol=1e-12, strategy="direct")
        np.testing.assert_allclose(fast.R, slow.R, rtol=1e-8)

    def test_start_of_window_is_flat(self):
        ensemble = integ.phase_ensemble(POWER2, 1000.0, -1.0, 8)
        self.assertEqual(ensemble.R.tolist(), [1.0] * 8)

    def test_deterministic_grid(self):
        ensemble = integ.phase_ensemble(POWER2, 10.0, 0.5, 8)
        np.testing.assert_allclose(ensemble.phis, [k * math.pi / 4 for k in range(8)])

    def test_rejects_small_sample_count(self):
        with self.assertRaises(DomainError):
            integ.phase_ensemble(POWER2, 10.0, 0.5, 7)

    def test_rejects_unknown_strategy(self):
        with self.assertRaises(DomainError):
            integ.phase_ensemble(POWER2, 10.0, 0.5, 8, strategy="random")

    def test_phase_point_task(self):
        payload = {"profile": "power:n=2", "G": 10.0, "T": [-1.0, 0.5], "K": 8}
        result = evaluate_phase_point_task.apply(args=[payload]).get()
        self.assertEqual(result["profile"], "power:n=2")
        self.assertEqual(len(result["curves"]), 2)
        self.assertEqual(result["curves"][0]["R"], [1.0] * 8)


class ModeIntegrationTests(SimpleTestCase):

    def test_initial_mode(self):
        series = integ.integrate_mode(POWER2, 5.0, 0.5, rel_tol=1e-12)
        first = series.states[0]
        self.assertAlmostEqual(abs(first.eps - 1.0), 0.0, places=12)
        self.assertAlmostEqual(abs(first.deps - 1j), 0.0, places=12)

    def test_wronskian_conserved(self):
        for profile in (POWER2, FrequencyProfile.power(0.5), FrequencyProfile.sin2()):
            series = integ.integrate_mode(profile, 1000.0, 1.0, rel_tol=1e-12)
            self.assertLessEqual(series.max_wronskian_residual, 1e-8, msg=profile.label)

    def test_hard_drift_raises_only_when_strict(self):
        # 하드 한계 0: 어떤 드리프트든 초과
        with mock.patch.dict(settings.ZEROCROSS, {"WRONSKIAN_HARD_TOL": 0.0}):
            with self.assertRaises(NumericalFailure) as ctx:
                integ.integrate_mode(POWER2, 100.0, -0.5, rel_tol=1e-6)
            self.assertIsNotNone(ctx.exception.error_estimate)
            series = integ.integrate_mode(POWER2, 100.0, -0.5, rel_tol=1e-6, strict=False)
        self.assertGreater(series.max_wronskian_residual, 0.0)

    def test_energy_ratio_matches_phase_average(self):
        series = integ.integrate_mode(POWER2, 1000.0, 1.0, samples=[1.0])
        mode = series.states[-1]
        special = (abs(mode.eps) ** 2 + abs(mode.deps) ** 2) / 2.0
        ensemble = integ.phase_ensemble(POWER2, 1000.0, 1.0, 360)
        self.assertAlmostEqual(special, ensemble.mean, delta=1e-8 * special)
        self.assertAlmostEqual(special, 3.0, delta=0.03)

    def test_sudden_limit(self):
        mode = integ.integrate_mode(POWER2, 0.1, 1.0, samples=[1.0]).states[-1]
        ratio = (abs(mode.eps) ** 2 + abs(mode.deps) ** 2) / 2.0
        self.assertAlmostEqual(ratio, 1.0, delta=0.1)


class BogoliubovExtractionTests(SimpleTestCase):

    def test_adiabatic_mode_has_no_negative_frequency_part(self):
        mode = integ.adiabatic_mode(POWER2, 1000.0, -0.5)
        pair = integ.extract_bogoliubov(mode, 0.5, 0.3)
        self.assertAlmostEqual(abs(pair.u_minus), 0.0, places=12)
        self.assertAlmostEqual(abs(pair.u_plus), 1.0, places=12)

    def test_adiabatic_mode_rejected_after_crossing(self):
        with self.assertRaises(DomainError):
            integ.adiabatic_mode(POWER2, 1000.0, 0.5)

    def test_pre_crossing_numeric_mode(self):
        series = integ.integrate_mode(POWER2, 1000.0, -0.8, rel_tol=1e-12, samples=[-0.8])
        pair = integ.extract_bogoliubov_at(series, -0.8)
        self.assertLessEqual(abs(pair.u_minus), 1e-3)
        self.assertAlmostEqual(abs(pair.u_plus), 1.0, delta=1e-3)

    def test_post_crossing_pairs(self):
        for n, expected in ((2.0, 1.0), (1.0, 1.0 / math.tan(math.pi / 3))):
            profile = FrequencyProfile.power(n)
            series = integ.integrate_mode(profile, 1000.0, 1.0, rel_tol=1e-12, samples=[1.0])
            pair = integ.extract_bogoliubov_at(series, 1.0)
            self.assertAlmostEqual(abs(pair.u_minus), expected, delta=0.01 * expected, msg=n)
            self.assertLessEqual(pair.invariant_residual, 1e-6)

    def test_window_guard(self):
        series = integ.integrate_mode(POWER2, 100.0, 0.05, samples=[0.05])
        with self.assertRaises(DomainError):
            integ.extract_bogoliubov_at(series, 0.05)

    def test_non_positive_frequency_rejected(self):
        with self.assertRaises(DomainError):
            integ.extract_bogoliubov(ModeState(0.0, 1.0, 1j), 0.0, 0.0)

    def test_pair_helpers(self):
        identity = BogoliubovPair.identity()
        self.assertEqual(identity.beta, 1.0)
        pair = BogoliubovPair.from_minus_magnitude(1.0)
        self.assertAlmostEqual(abs(pair.u_plus), math.sqrt(2.0), places=15)
        self.assertEqual(pair.validate(), pair)
        with self.assertRaises(DomainError):
            BogoliubovPair(1.0, 1.0).validate()


class ErmakovTests(SimpleTestCase):

    @staticmethod
    def _free_series(rotation: complex = 1.0) -> ModeSeries:
        def mode_at(T):
            eps = rotation * cmath.exp(1j * T)
            return ModeState(T, eps, 1j * eps)

        return ModeSeries(
            G=1.0,
            states=tuple(mode_at(T) for T in np.linspace(-1.0, 1.0, 51)),
            mode_at=mode_at,
            omega_sq=lambda T: 1.0,
            T_min=-1.0,
            T_max=1.0,
        )

    def test_constant_frequency(self):
        self.assertLessEqual(integ.ermakov_residual(self._free_series()), 1e-6)

    def test_numeric_pre_crossing_window(self):
        series = integ.integrate_mode(POWER2, 100.0, -0.5, rel_tol=1e-12)
        self.assertLessEqual(integ.ermakov_residual(series, -1.0, -0.5), 1e-4)

    def test_global_phase_invariance(self):
        series = integ.integrate_mode(POWER2, 100.0, -0.5, rel_tol=1e-12)
        rotation = cmath.exp(0.7j)
        rotated = ModeSeries(
            G=series.G,
            states=series.states,
            mode_at=lambda T: ModeState(T, rotation * series.eps_at(T), 0j),
            omega_sq=series.omega_sq,
            T_min=series.T_min,
            T_max=series.T_max,
        )
        self.assertAlmostEqual(
            integ.ermakov_residual(rotated), integ.ermakov_residual(series), delta=1e-9,
        )
