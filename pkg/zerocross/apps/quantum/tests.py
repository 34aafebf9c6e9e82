import cmath
import math

from django.conf import settings
from django.test import SimpleTestCase, override_settings
from hypothesis import given, settings as hypothesis_settings, strategies as st

from apps.exceptions import DomainError, NumericalFailure
from apps.integrator.services import BogoliubovPair, ModeState

from .serializers import FockSummarySerializer, VarianceReportSerializer
from .services import MomentState, SqueezingParams, quantum_service as qs

# 한 번의 n=2 통과: |u-| = 1, |u+| = sqrt(2)
PAIR_N2 = BogoliubovPair.from_minus_magnitude(1.0)
SQRT2 = math.sqrt(2.0)


def _single_crossing_pair(n: float) -> BogoliubovPair:
    nu = 1.0 / (n + 2.0)
    return BogoliubovPair.from_minus_magnitude(1.0 / math.tan(nu * math.pi))


def _adiabatic_mode(pair: BogoliubovPair, omega: float, phi: float) -> ModeState:
    a = pair.u_plus * cmath.exp(1j * phi)
    b = pair.u_minus * cmath.exp(-1j * phi)
    return ModeState(1.0, (a + b) / math.sqrt(omega), 1j * math.sqrt(omega) * (a - b))


class MomentStateTests(SimpleTestCase):

    def test_invariant(self):
        self.assertEqual(MomentState(2.0, 1.0, 2.0).D, 1.0)
        self.assertEqual(MomentState.vacuum().D, 0.25)

    def test_uncertainty_bound(self):
        with self.assertRaises(DomainError):
            MomentState(0.5, 0.4, 0.0)
        with self.assertRaises(DomainError):
            MomentState(-1.0, 1.0, 0.0)

    def test_fock_moments_scale_with_frequency(self):
        state = MomentState.fock(3, omega=2.0)
        self.assertEqual(state.xx, 1.75)
        self.assertEqual(state.pp, 7.0)


class MomentEvolutionTests(SimpleTestCase):

    def test_identity_evolution(self):
        initial = MomentState(2.0, 1.0, 2.0)
        evolved = qs.evolve_moments(initial, ModeState(-1.0, 1.0 + 0j, 1j))
        self.assertEqual(evolved, initial)

    def test_invariant_is_conserved(self):
        eps = 1.3 + 0.4j
        deps = complex(0.5, 1.2 / 1.3)
        initial = MomentState(2.0, 1.0, 2.0)
        evolved = qs.evolve_moments(initial, ModeState(0.5, eps, deps))
        self.assertAlmostEqual(evolved.D, initial.D, delta=1e-10)

    def test_mean_energy(self):
        self.assertEqual(qs.mean_energy(MomentState.vacuum(), 1.0), 0.5)
        self.assertEqual(qs.mean_energy(MomentState(2.0, 1.0, 0.0), 0.0), 0.5)
        with self.assertRaises(DomainError):
            qs.mean_energy(MomentState.vacuum(), -1.0)

    def test_special_state_gains_beta(self):
        omega = 2.0
        mode = _adiabatic_mode(PAIR_N2, omega, 0.7)
        evolved = qs.evolve_moments(MomentState.vacuum(), mode)
        ratio = qs.mean_energy(evolved, omega) / (omega * qs.mean_energy(MomentState.vacuum(), 1.0))
        self.assertAlmostEqual(ratio, 3.0, delta=1e-12)
        self.assertAlmostEqual(qs.energy_ratio_special(mode, omega), 3.0 * omega, delta=1e-12)

    def test_energy_ratio_special_at_start(self):
        self.assertEqual(qs.energy_ratio_special(ModeState(-1.0, 1.0 + 0j, 1j), 1.0), 1.0)


class FockTransitionTests(SimpleTestCase):

    def test_survival_probabilities(self):
        expected = {0: 1 / SQRT2, 1: 1 / (2 * SQRT2), 2: 1 / (16 * SQRT2), 3: 1 / (32 * SQRT2)}
        for N, p in expected.items():
            self.assertAlmostEqual(qs.survival_probability(N, PAIR_N2), p, delta=1e-12, msg=N)
            self.assertAlmostEqual(qs.fock_transition_prob(N, N, PAIR_N2), p, delta=1e-12, msg=N)

    def test_vacuum_to_even(self):
        pair = BogoliubovPair.from_minus_magnitude(0.7)
        for K in range(6):
            expected = qs.vacuum_to_even(K, pair)
            self.assertAlmostEqual(qs.fock_transition_prob(0, 2 * K, pair), expected, delta=1e-12 * max(expected, 1e-3))

    def test_odd_difference_is_zero(self):
        self.assertEqual(qs.fock_transition_prob(2, 5, PAIR_N2), 0.0)

    def test_identity_pair(self):
        identity = BogoliubovPair.identity()
        self.assertEqual(qs.fock_transition_prob(4, 4, identity), 1.0)
        self.assertEqual(qs.fock_transition_prob(4, 6, identity), 0.0)

    def test_symmetric_in_levels(self):
        pair = BogoliubovPair.from_minus_magnitude(1.7)
        for N, M in ((0, 6), (3, 11), (10, 40)):
            self.assertAlmostEqual(
                qs.fock_transition_prob(N, M, pair),
                qs.fock_transition_prob(M, N, pair),
                delta=1e-12,
            )

    def test_single_crossing_form(self):
        for n in (1.0, 2.0, 4.0):
            pair = _single_crossing_pair(n)
            for N, M in ((0, 0), (1, 3), (4, 2), (5, 13)):
                expected = qs.fock_transition_prob(N, M, pair)
                self.assertAlmostEqual(
                    qs.fock_transition_prob_single_crossing(N, M, n),
                    expected,
                    delta=1e-10 * max(expected, 1e-6),
                    msg=(n, N, M),
                )

    def test_large_levels_do_not_overflow(self):
        p = qs.fock_transition_prob(200, 260, BogoliubovPair.from_minus_magnitude(2.0))
        self.assertTrue(0.0 <= p <= 1.0)

    def test_rejects_negative_level(self):
        with self.assertRaises(DomainError):
            qs.fock_transition_prob(-1, 1, PAIR_N2)


class FockDistributionTests(SimpleTestCase):

    def test_vacuum_ratio(self):
        distribution = qs.fock_distribution(0, PAIR_N2)
        self.assertAlmostEqual(distribution.probs[0], 1 / SQRT2, delta=1e-12)
        self.assertAlmostEqual(distribution.probs[2] / distribution.probs[0], 0.25, delta=1e-12)
        self.assertNotIn(1, distribution.probs)

    def test_identity_pair(self):
        distribution = qs.fock_distribution(3, BogoliubovPair.identity())
        self.assertEqual(distribution.probs, {1: 0.0, 3: 1.0})

    def test_heavy_tail_for_excited_state(self):
        distribution = qs.fock_distribution(9, PAIR_N2)
        self.assertAlmostEqual(distribution.mass_at_or_above(27), 0.5, delta=0.05)

    def test_moment_identities(self):
        for N in (0, 1, 5, 20):
            for u_minus in (0.3, 1.0):
                pair = BogoliubovPair.from_minus_magnitude(u_minus)
                distribution = qs.fock_distribution(N, pair, tail_bound=1e-12)
                total = distribution.total
                self.assertGreaterEqual(total, 1.0 - 1e-12)
                self.assertLessEqual(total, 1.0 + 1e-12)
                moments = qs.distribution_moments(distribution)
                first = pair.beta * (N + 0.5)
                variance = 2.0 * abs(pair.u_plus * pair.u_minus) ** 2 * (N * N + N + 1)
                self.assertAlmostEqual(moments.first_level_moment, first, delta=1e-8 * first, msg=(N, u_minus))
                self.assertAlmostEqual(moments.level_variance, variance, delta=1e-7 * variance, msg=(N, u_minus))

    def test_tail_bound_range(self):
        with self.assertRaises(DomainError):
            qs.fock_distribution(0, PAIR_N2, tail_bound=1e-3)

    @override_settings(ZEROCROSS={**settings.ZEROCROSS, "FOCK_MAX_TERMS": 5})
    def test_term_limit(self):
        with self.assertRaises(NumericalFailure):
            qs.fock_distribution(0, BogoliubovPair.from_minus_magnitude(3.0))

    def test_summary_serializer(self):
        distribution = qs.fock_distribution(2, PAIR_N2)
        data = FockSummarySerializer({
            "distribution": distribution,
            "moments": qs.distribution_moments(distribution),
            "mandel_q_closed_form": qs.mandel_q(2, PAIR_N2),
        }).data
        self.assertEqual(data["N"], 2)
        self.assertEqual(data["levels"], len(distribution.probs))
        self.assertAlmostEqual(data["moments"]["mandel_q"], data["mandel_q_closed_form"], delta=1e-7)


class FluctuationTests(SimpleTestCase):

    def test_vacuum_variance_ratios(self):
        result = qs.energy_variance_fock(0, PAIR_N2)
        self.assertAlmostEqual(result.variance, 4.0, delta=1e-12)
        self.assertAlmostEqual(result.ratio_to_adiabatic, 16.0, delta=1e-12)
        self.assertAlmostEqual(result.ratio_to_mean, 16.0 / 9.0, delta=1e-12)

    def test_variance_vanishes_without_mixing(self):
        self.assertEqual(qs.energy_variance_fock(7, BogoliubovPair.identity()).variance, 0.0)

    def test_large_n_ratio(self):
        self.assertAlmostEqual(qs.energy_variance_fock(1000, PAIR_N2).ratio_to_adiabatic, 4.0, delta=1e-2)

    def test_mandel_closed_form(self):
        for N in range(4):
            expected = (3 + N + 4 * N * N) / (3 * N + 1)
            self.assertAlmostEqual(qs.mandel_q(N, PAIR_N2), expected, delta=1e-12, msg=N)
        self.assertAlmostEqual(qs.mandel_q(3, PAIR_N2), 4.2, delta=1e-12)

    def test_mandel_matches_distribution(self):
        pair = BogoliubovPair.from_minus_magnitude(0.8)
        moments = qs.distribution_moments(qs.fock_distribution(3, pair, tail_bound=1e-12))
        self.assertAlmostEqual(moments.mandel_q, qs.mandel_q(3, pair), delta=1e-7)

    def test_mandel_undefined_for_untouched_vacuum(self):
        with self.assertRaises(DomainError):
            qs.mandel_q(0, BogoliubovPair.identity())

    def test_variance_routes_agree(self):
        cases = (
            (0, PAIR_N2),
            (1, BogoliubovPair.identity()),
            (5, BogoliubovPair.from_minus_magnitude(math.sqrt(0.5))),
            (2, BogoliubovPair(cmath.rect(SQRT2, 0.3), cmath.rect(1.0, -0.5))),
        )
        for N, pair in cases:
            report = qs.moment_variance_check(N, pair)
            self.assertTrue(report.consistent, msg=N)
            self.assertAlmostEqual(report.operator_route, report.closed_form, delta=1e-9 * max(1.0, report.closed_form))

    def test_report_serializer(self):
        data = VarianceReportSerializer(qs.moment_variance_check(0, PAIR_N2)).data
        self.assertEqual(set(data), {"N", "closed_form", "operator_route", "distribution_route", "max_relative_gap", "consistent"})
        self.assertAlmostEqual(data["closed_form"], 4.0, delta=1e-12)

    @hypothesis_settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=30), st.floats(min_value=0.0, max_value=3.0))
    def test_variance_is_nonnegative(self, N, u_minus):
        result = qs.energy_variance_fock(N, BogoliubovPair.from_minus_magnitude(u_minus))
        self.assertGreaterEqual(result.variance, 0.0)
        self.assertGreaterEqual(result.ratio_to_adiabatic, 0.0)


class SqueezingTests(SimpleTestCase):
    TAN2_PI_8 = math.tan(math.pi / 8) ** 2

    def test_after_single_crossing(self):
        self.assertAlmostEqual(qs.squeezing_after_crossing(1.0, 3.0), self.TAN2_PI_8, delta=1e-12)
        self.assertAlmostEqual(qs.squeezing_single_crossing(1.0, 2.0), self.TAN2_PI_8, delta=1e-12)

    def test_fock_threshold(self):
        self.assertAlmostEqual(qs.squeezing_after_crossing(5.0, 3.0), 0.858, delta=1e-3)
        self.assertLess(qs.squeezing_after_crossing(5.0, 3.0), 1.0)
        self.assertAlmostEqual(qs.squeezing_after_crossing(7.0, 3.0), 1.20, delta=1e-2)
        self.assertGreater(qs.squeezing_after_crossing(7.0, 3.0), 1.0)

    def test_special_state_is_not_squeezed(self):
        self.assertEqual(qs.squeezing_invariant(SqueezingParams(3.0, 3.0)), 3.0)

    def test_rejects_unphysical_params(self):
        with self.assertRaises(DomainError):
            SqueezingParams(1.0, 2.0)
        with self.assertRaises(DomainError):
            qs.squeezing_after_crossing(1.0, 0.5)

    def test_scan_matches_invariant(self):
        for moments, omega in ((MomentState(2.0, 1.0, 2.0), 1.5), (MomentState(0.3, 2.0, -0.4), 0.7)):
            params = qs.squeezing_params(moments, omega)
            self.assertAlmostEqual(
                qs.min_coordinate_variance_scan(moments, omega),
                qs.squeezing_invariant(params),
                delta=1e-8,
            )

    def test_vacuum_after_crossing(self):
        omega = 2.0
        evolved = qs.evolve_moments(MomentState.vacuum(), _adiabatic_mode(PAIR_N2, omega, 0.7))
        params = qs.squeezing_params(evolved, omega)
        self.assertAlmostEqual(params.gamma, 1.0, delta=1e-12)
        self.assertAlmostEqual(params.lam, 3.0, delta=1e-12)
        self.assertAlmostEqual(qs.squeezing_invariant(params), self.TAN2_PI_8, delta=1e-10)
