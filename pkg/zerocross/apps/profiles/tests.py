import math

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from apps.exceptions import DomainError

from .services import FrequencyProfile, ProfileKind, profile_service as ps


class ProfileValueTests(SimpleTestCase):

    def test_power_boundary_values(self):
        profile = FrequencyProfile.power(2)
        self.assertEqual(ps.f_value(profile, -1.0), 1.0)
        self.assertEqual(ps.f_value(profile, 0.0), 0.0)

    def test_fractional_power(self):
        profile = FrequencyProfile.power(0.5)
        self.assertAlmostEqual(ps.f_value(profile, -0.25), 1 / math.sqrt(2), places=15)

    def test_tanh_normalisation(self):
        profile = FrequencyProfile.tanh_power(2, 5)
        self.assertAlmostEqual(ps.f_value(profile, -1.0), 1.0, places=15)
        self.assertEqual(ps.f_value(profile, 0.0), 0.0)

    def test_sin2_zeros_and_peak(self):
        profile = FrequencyProfile.sin2()
        self.assertAlmostEqual(ps.f_value(profile, -1.0), 1.0, places=15)
        self.assertAlmostEqual(ps.f_value(profile, 2.0), 0.0, places=15)

    def test_rejects_bad_construction(self):
        with self.assertRaises(DomainError):
            FrequencyProfile.power(0)
        with self.assertRaises(DomainError):
            FrequencyProfile.tanh_power(2, -1)

    def test_rejects_non_finite_time(self):
        with self.assertRaises(DomainError):
            ps.f_value(FrequencyProfile.power(2), math.inf)

    def test_rejects_time_before_window(self):
        with self.assertRaises(DomainError):
            ps.f_value(FrequencyProfile.power(2), -1.5)

    @settings(max_examples=100, derandomize=True, deadline=None)
    @given(st.floats(min_value=0.1, max_value=6.0), st.floats(min_value=0.0, max_value=1.0))
    def test_power_is_even(self, n, T):
        profile = FrequencyProfile.power(n)
        self.assertEqual(ps.f_value(profile, T), ps.f_value(profile, -T))

    def test_derivative_matches_difference(self):
        h = 1e-6
        for profile in (
            FrequencyProfile.power(3),
            FrequencyProfile.tanh_power(1.5, 5),
            FrequencyProfile.sin2(),
            FrequencyProfile.epstein_eckart(4),
        ):
            T = -0.37
            numeric = (ps.f_value(profile, T + h) - ps.f_value(profile, T - h)) / (2 * h)
            self.assertAlmostEqual(ps.f_derivative(profile, T), numeric, delta=1e-6, msg=profile.label)

    def test_adiabaticity_infinite_at_zero(self):
        self.assertEqual(ps.adiabaticity(FrequencyProfile.power(2), 100.0, 0.0), math.inf)


class CrossingTests(SimpleTestCase):

    def test_power_single_crossing(self):
        crossings = ps.zero_crossings(FrequencyProfile.power(2), 1.0)
        self.assertEqual([c.T for c in crossings], [0.0])
        self.assertEqual(crossings[0].local_index, 2.0)

    def test_sin2_crossings_are_quadratic(self):
        crossings = ps.zero_crossings(FrequencyProfile.sin2(), 3.0)
        self.assertEqual([c.T for c in crossings], [0.0, 2.0])
        self.assertTrue(all(c.local_index == 2.0 for c in crossings))
        self.assertEqual(crossings[0].nu, 0.25)

    def test_tanh_single_crossing(self):
        crossings = ps.zero_crossings(FrequencyProfile.tanh_power(1, 5), 0.5)
        self.assertEqual([(c.T, c.local_index) for c in crossings], [(0.0, 1.0)])

    def test_before_first_crossing(self):
        self.assertEqual(ps.zero_crossings(FrequencyProfile.power(2), -0.5), [])


class PhaseIntegralTests(SimpleTestCase):

    def test_linear_integrand(self):
        self.assertAlmostEqual(ps.phase_integral(FrequencyProfile.power(2), 1.0, 0.0, 1.0), 0.5, places=13)

    def test_sin2_arch(self):
        G = 37.0
        value = ps.phase_integral(FrequencyProfile.sin2(), G, 1.0, 3.0)
        self.assertAlmostEqual(value, 4 * G / math.pi, delta=1e-11 * value)

    def test_empty_interval(self):
        self.assertEqual(ps.phase_integral(FrequencyProfile.tanh_power(2), 10.0, 0.3, 0.3), 0.0)

    def test_rejects_reversed_interval(self):
        with self.assertRaises(DomainError):
            ps.phase_integral(FrequencyProfile.power(2), 1.0, 0.5, 0.1)

    def test_additivity(self):
        for profile in (FrequencyProfile.power(0.5), FrequencyProfile.tanh_power(2, 5), FrequencyProfile.sin2()):
            whole = ps.phase_integral(profile, 100.0, -1.0, 1.0)
            parts = ps.phase_integral(profile, 100.0, -1.0, 0.3) + ps.phase_integral(profile, 100.0, 0.3, 1.0)
            self.assertAlmostEqual(whole, parts, delta=1e-10 * whole, msg=profile.label)

    def test_power_matches_bessel_argument(self):
        G = 250.0
        for n in (0.5, 1.0, 2.0, 4.0):
            nu = 1.0 / (n + 2.0)
            for T in (0.1, 0.5, 1.0):
                y = 2 * G * nu * T ** (1.0 / (2 * nu))
                value = ps.phase_integral(FrequencyProfile.power(n), G, 0.0, T)
                self.assertAlmostEqual(value, y, delta=1e-10 * y)

    def test_closed_forms_agree(self):
        G = 80.0
        for profile in (FrequencyProfile.power(1.5), FrequencyProfile.epstein_eckart(6), FrequencyProfile.sin2()):
            numeric = ps.phase_integral(profile, G, -0.8, 2.6 if profile.kind == ProfileKind.SIN2 else 0.9)
            closed = ps.phase_closed_form(profile, G, -0.8, 2.6 if profile.kind == ProfileKind.SIN2 else 0.9)
            self.assertAlmostEqual(numeric, closed, delta=1e-10 * numeric, msg=profile.label)

    def test_phase_since_crossing_sign(self):
        profile = FrequencyProfile.power(2)
        self.assertLess(ps.phase_since_crossing(profile, 10.0, -0.5), 0.0)
        self.assertAlmostEqual(ps.phase_since_crossing(profile, 10.0, 1.0), 5.0, places=12)
        self.assertAlmostEqual(
            ps.phase_since_crossing(FrequencyProfile.sin2(), 10.0, 3.0), 20.0 / math.pi, places=11,
        )


class ProfileParseTests(SimpleTestCase):

    def test_known_forms(self):
        self.assertEqual(ps.parse("power:n=2"), FrequencyProfile.power(2))
        self.assertEqual(ps.parse("TANH:n=2,a=5"), FrequencyProfile.tanh_power(2, 5))
        self.assertEqual(ps.parse("sin2"), FrequencyProfile.sin2())
        self.assertEqual(ps.parse("ee:a=15"), FrequencyProfile.epstein_eckart(15))

    def test_unknown_key_rejected(self):
        with self.assertRaises(DomainError):
            ps.parse("power:n=2,b=3")
        with self.assertRaises(DomainError):
            ps.parse("sin2:n=2")

    def test_unknown_kind_rejected(self):
        with self.assertRaises(DomainError):
            ps.parse("cosh:n=2")

    def test_label_round_trip(self):
        profile = FrequencyProfile.tanh_power(1.5, 5)
        self.assertEqual(ps.parse(profile.label), profile)

    def test_omega_tilde_steepness(self):
        self.assertEqual(FrequencyProfile.from_omega_tilde(4.0, 200.0).a, 25.0)
