import cmath
import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from apps.exceptions import DomainError
from apps.integrator.services import BogoliubovPair, ModeState, integrator_service
from apps.profiles.services import FrequencyProfile
from apps.quantum.services import MomentState, quantum_service

from .serializers import CrossingPlanSerializer
from .services import CrossingPlan, PlannedCrossing, transition_service as ts

PAIR_N2 = BogoliubovPair.from_minus_magnitude(1.0)
SKEWED = BogoliubovPair(cmath.rect(math.sqrt(2.0), 0.3), cmath.rect(1.0, -0.5))

pairs = st.builds(
    lambda r, a, b: BogoliubovPair(cmath.rect(math.sqrt(1.0 + r * r), a), cmath.rect(r, b)),
    st.floats(min_value=0.0, max_value=4.0),
    st.floats(min_value=-math.pi, max_value=math.pi),
    st.floats(min_value=-math.pi, max_value=math.pi),
)
phases = st.floats(min_value=0.0, max_value=20.0)


def _assert_pairs_close(case, a: BogoliubovPair, b: BogoliubovPair, delta: float = 1e-12):
    case.assertAlmostEqual(abs(a.u_plus - b.u_plus), 0.0, delta=delta)
    case.assertAlmostEqual(abs(a.u_minus - b.u_minus), 0.0, delta=delta)


class CompositionTests(SimpleTestCase):

    def test_identity_second_crossing(self):
        Phi = 1.1
        result = ts.compose_two(SKEWED, ts.identity_pair(), Phi)
        _assert_pairs_close(self, result, BogoliubovPair(
            SKEWED.u_plus * cmath.exp(1j * Phi), SKEWED.u_minus * cmath.exp(-1j * Phi),
        ))
        self.assertAlmostEqual(ts.beta_of(result), ts.beta_of(SKEWED), delta=1e-12)

    def test_beta_of(self):
        self.assertEqual(ts.beta_of(ts.identity_pair()), 1.0)
        self.assertAlmostEqual(ts.beta_of(PAIR_N2), 3.0, places=14)
        cot = 1.0 / math.tan(math.pi / 3.0)
        self.assertAlmostEqual(ts.beta_of(BogoliubovPair.from_minus_magnitude(cot)), 5.0 / 3.0, places=14)

    @settings(max_examples=50, deadline=None)
    @given(pairs, pairs, phases)
    def test_invariant_and_closed_form(self, u, w, Phi):
        result = ts.compose_two(u, w, Phi)
        scale = abs(result.u_plus) ** 2
        self.assertLessEqual(result.invariant_residual, 1e-10 * max(1.0, scale))
        self.assertAlmostEqual(result.beta, ts.beta_two(u, w, Phi), delta=1e-12 * max(1.0, result.beta))

    @settings(max_examples=30, deadline=None)
    @given(pairs, pairs, pairs, phases, phases)
    def test_associative(self, a, b, c, first, second):
        left = ts.compose_two(ts.compose_two(a, b, first), c, second)
        right = ts.compose_two(a, ts.compose_two(b, c, second), first)
        scale = max(1.0, abs(left.u_plus))
        _assert_pairs_close(self, left, right, delta=1e-11 * scale)


class ExtremesTests(SimpleTestCase):

    def test_double_crossing_extremes(self):
        beta_min, beta_max = ts.beta_extremes(PAIR_N2, PAIR_N2)
        self.assertAlmostEqual(beta_min, 1.0, delta=1e-12)
        self.assertAlmostEqual(beta_max, 17.0, delta=1e-12)

    def test_identity_has_no_spread(self):
        beta_min, beta_max = ts.beta_extremes(SKEWED, ts.identity_pair())
        self.assertAlmostEqual(beta_min, SKEWED.beta, delta=1e-12)
        self.assertAlmostEqual(beta_max, SKEWED.beta, delta=1e-12)

    def test_scan_reaches_extremes(self):
        for u, w in ((PAIR_N2, PAIR_N2), (SKEWED, PAIR_N2), (PAIR_N2, BogoliubovPair.from_minus_magnitude(0.4))):
            beta_min, beta_max = ts.beta_extremes(u, w)
            scan = ts.phi_scan(u, w)
            self.assertEqual(len(scan.phis), 10_000)
            self.assertGreaterEqual(float(np.min(scan.betas)), beta_min - 1e-10)
            self.assertLessEqual(float(np.max(scan.betas)), beta_max + 1e-10)
            self.assertAlmostEqual(scan.beta_min, beta_min, delta=1e-6)
            self.assertAlmostEqual(scan.beta_max, beta_max, delta=1e-6)

    def test_scan_matches_composition(self):
        scan = ts.phi_scan(SKEWED, PAIR_N2, samples=64)
        for Phi, beta in zip(scan.phis[::8], scan.betas[::8]):
            self.assertAlmostEqual(ts.compose_two(SKEWED, PAIR_N2, float(Phi)).beta, beta, delta=1e-12)

    def test_scan_needs_samples(self):
        with self.assertRaises(DomainError):
            ts.phi_scan(PAIR_N2, PAIR_N2, samples=4)


class CrossingPlanTests(SimpleTestCase):

    def test_empty_and_single(self):
        self.assertEqual(ts.compose_plan(CrossingPlan()), BogoliubovPair.identity())
        self.assertEqual(ts.compose_plan(CrossingPlan((PlannedCrossing(SKEWED, 5.0),))), SKEWED)

    def test_fold_matches_pairwise(self):
        plan = ts.plan_from_pairs([PAIR_N2, SKEWED, PAIR_N2], [0.4, 2.2])
        expected = ts.compose_two(ts.compose_two(PAIR_N2, SKEWED, 0.4), PAIR_N2, 2.2)
        _assert_pairs_close(self, ts.compose_plan(plan), expected)
        trace = ts.beta_trace(plan)
        self.assertEqual(len(trace), 3)
        self.assertAlmostEqual(trace[0], 3.0, places=14)
        self.assertAlmostEqual(trace[-1], expected.beta, delta=1e-12 * expected.beta)

    def test_many_random_crossings(self):
        rng = np.random.default_rng(20240611)
        plan = ts.plan_from_pairs([PAIR_N2] * 50, list(rng.uniform(0.0, 2.0 * math.pi, 49)))
        result = ts.compose_plan(plan)
        self.assertLessEqual(result.invariant_residual, 1e-10 * abs(result.u_plus) ** 2)
        trace = ts.beta_trace(plan)
        self.assertEqual(len(trace), 50)
        self.assertTrue(all(beta >= 1.0 - 1e-9 for beta in trace))
        self.assertTrue(any(later < earlier for earlier, later in zip(trace, trace[1:])))

    def test_rejects_invalid_plans(self):
        with self.assertRaises(DomainError):
            CrossingPlan((PlannedCrossing(BogoliubovPair(1.0 + 0j, 1.0 + 0j)),))
        with self.assertRaises(DomainError):
            CrossingPlan((PlannedCrossing(PAIR_N2), PlannedCrossing(PAIR_N2, -0.1)))
        with self.assertRaises(DomainError):
            ts.plan_from_pairs([PAIR_N2, PAIR_N2], [])


class PlanSerializerTests(SimpleTestCase):

    def test_round_trip(self):
        plan = ts.plan_from_pairs([PAIR_N2, SKEWED], [1.25])
        serializer = CrossingPlanSerializer(data=CrossingPlanSerializer.from_plan(plan))
        self.assertTrue(serializer.is_valid(), serializer.errors)
        restored = serializer.to_plan()
        self.assertEqual(len(restored), 2)
        self.assertEqual(restored.crossings[1].phi_before, 1.25)
        _assert_pairs_close(self, restored.crossings[1].pair, SKEWED, delta=0.0)

    def test_rejects_broken_pair(self):
        serializer = CrossingPlanSerializer(data={"crossings": [{"u_plus": [1.0, 0.0], "u_minus": [0.5, 0.0]}]})
        self.assertFalse(serializer.is_valid())

    def test_rejects_negative_phase(self):
        serializer = CrossingPlanSerializer(data={
            "crossings": [{"u_plus": [1.0, 0.0], "u_minus": [0.0, 0.0], "phi_before": -1.0}],
        })
        self.assertFalse(serializer.is_valid())
        self.assertIn("crossings", serializer.errors)

    def test_rejects_malformed_complex(self):
        serializer = CrossingPlanSerializer(data={"crossings": [{"u_plus": [1.0], "u_minus": [0.0, 0.0]}]})
        self.assertFalse(serializer.is_valid())


class GeneralStateAmplificationTests(SimpleTestCase):

    def test_special_state_has_no_correction(self):
        self.assertAlmostEqual(ts.beta_general(SKEWED, MomentState.vacuum()), SKEWED.beta, delta=1e-12)

    def test_no_mixing_means_no_gain(self):
        self.assertEqual(ts.beta_general(BogoliubovPair.identity(), MomentState(2.0, 1.0, 2.0)), 1.0)

    def test_correction_value(self):
        # E0 = 3/2, Re(u+ u-) = sqrt(2), Im(u+ u-) = 0
        expected = 3.0 + math.sqrt(2.0) / 1.5
        self.assertAlmostEqual(ts.beta_general(PAIR_N2, MomentState(2.0, 1.0, 2.0)), expected, delta=1e-12)

    def test_matches_moment_evolution(self):
        omega, phi = 2.0, 0.7
        a = SKEWED.u_plus * cmath.exp(1j * phi)
        b = SKEWED.u_minus * cmath.exp(-1j * phi)
        mode = ModeState(1.0, (a + b) / math.sqrt(omega), 1j * math.sqrt(omega) * (a - b))
        initial = MomentState(2.0, 1.0, 2.0)
        evolved = quantum_service.evolve_moments(initial, mode)
        ratio = quantum_service.mean_energy(evolved, omega) / (omega * quantum_service.mean_energy(initial, 1.0))
        self.assertAlmostEqual(ts.beta_general(SKEWED, initial), ratio, delta=1e-12)


class RepeatedCrossingIntegrationTests(SimpleTestCase):
    """sin^2 프로파일: 한 번 통과 후 평균은 G 에 둔감, 두 번 통과 후에는 민감"""

    def test_second_crossing_is_sensitive_to_G(self):
        profile = FrequencyProfile.sin2()
        after_one, after_two = [], []
        for G in (998.0, 999.0, 1000.0, 1001.0, 1002.0):
            first, second = integrator_service.phase_ensembles(profile, G, [1.0, 3.0], K=64, rel_tol=1e-10)
            after_one.append(first.mean)
            after_two.append(second.mean)
        self.assertLessEqual((max(after_one) - min(after_one)) / min(after_one), 0.01)
        self.assertAlmostEqual(sum(after_one) / len(after_one), 3.0, delta=0.06)
        self.assertGreater(max(after_two) - min(after_two), 1.0)
