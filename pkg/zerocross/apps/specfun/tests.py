import math

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from scipy import special

from apps.exceptions import DomainError

from .services import SpecialFunctionService, special_function_service as sf


class GammaTests(SimpleTestCase):
    """Gamma / log-factorial"""

    def test_half_is_sqrt_pi(self):
        self.assertAlmostEqual(sf.gamma_fn(0.5), math.sqrt(math.pi), delta=1e-13 * math.sqrt(math.pi))

    def test_reflection_pair(self):
        product = sf.gamma_fn(0.25) * sf.gamma_fn(0.75)
        self.assertAlmostEqual(product, math.pi * math.sqrt(2.0), delta=1e-13 * product)

    def test_integer_is_factorial(self):
        self.assertEqual(sf.gamma_fn(6.0), 120.0)

    def test_poles_rejected(self):
        for x in (0.0, -1.0, -7.0):
            with self.assertRaises(DomainError):
                sf.gamma_fn(x)
        with self.assertRaises(DomainError):
            sf.gamma_fn(math.nan)

    @settings(max_examples=200, derandomize=True, deadline=None)
    @given(st.floats(min_value=-169.5, max_value=170.0).filter(lambda x: abs(x - round(x)) > 1e-6))
    def test_matches_reference(self, x):
        expected = special.gamma(x)
        self.assertLessEqual(abs(sf.gamma_fn(x) - expected), 1e-13 * abs(expected))

    def test_large_arguments_keep_relative_accuracy(self):
        for x in (10.0 + 1e-9, 33.3, 150.3, 169.745, 169.9, 171.5, -150.3, -169.745):
            expected = special.gamma(x)
            self.assertLessEqual(abs(sf.gamma_fn(x) - expected), 1e-13 * abs(expected), msg=x)

    def test_stirling_switch_is_continuous(self):
        below, above = sf.gamma_fn(math.nextafter(10.0, 0.0)), sf.gamma_fn(math.nextafter(10.0, 20.0))
        self.assertAlmostEqual(below / 362880.0, 1.0, delta=1e-13)
        self.assertAlmostEqual(above / 362880.0, 1.0, delta=1e-13)

    def test_log_gamma_large(self):
        for x in (10.0, 170.5, 1e4, 1e8, 1e12):
            expected = float(special.gammaln(x))
            self.assertLessEqual(abs(sf.log_gamma(x) - expected), 1e-14 * max(1.0, abs(expected)), msg=x)

    def test_log_factorial_small_and_large(self):
        self.assertEqual(sf.log_factorial(0).log_magnitude, 0.0)
        self.assertAlmostEqual(sf.log_factorial(20).log_magnitude, math.log(math.factorial(20)), places=12)
        expected = math.lgamma(10001.0)
        self.assertLessEqual(abs(sf.log_factorial(10000).log_magnitude - expected), 1e-13 * expected)

    def test_double_factorial_ratios(self):
        ratio = lambda k: math.exp(sf.log_double_factorial(2 * k - 1).log_magnitude - sf.log_double_factorial(2 * k).log_magnitude)
        self.assertAlmostEqual(ratio(1), 0.5, places=15)
        self.assertAlmostEqual(ratio(2), 3.0 / 8.0, places=15)
        # 큰 인자는 log-gamma 경로
        self.assertAlmostEqual(
            sf.log_double_factorial(41).log_magnitude,
            math.log(math.prod(range(41, 0, -2))),
            delta=1e-12 * 100,
        )


class BesselTests(SimpleTestCase):

    def test_half_order_closed_form(self):
        self.assertAlmostEqual(sf.bessel_j(0.5, math.pi / 2), 2.0 / math.pi, delta=1e-14)

    def test_small_argument_leading_term(self):
        x = 1e-6
        leading = (x / 2) ** 0.25 / sf.gamma_fn(1.25)
        self.assertAlmostEqual(sf.bessel_j(0.25, x) / leading, 1.0, delta=1e-10)

    def test_wronskian_at_quarter_order(self):
        nu, x = 0.25, 3.0
        lhs = sf.bessel_j(nu, x) * sf.bessel_jp(-nu, x) - sf.bessel_j(-nu, x) * sf.bessel_jp(nu, x)
        self.assertAlmostEqual(lhs, -2.0 * math.sin(nu * math.pi) / (math.pi * x), delta=1e-10)

    def test_zero_argument(self):
        self.assertEqual(sf.bessel_j(0.0, 0.0), 1.0)
        self.assertEqual(sf.bessel_j(0.75, 0.0), 0.0)
        self.assertEqual(sf.bessel_j(-1.0, 0.0), 0.0)
        with self.assertRaises(DomainError):
            sf.bessel_j(-0.25, 0.0)

    def test_negative_argument_rejected(self):
        with self.assertRaises(DomainError):
            sf.bessel_j(0.25, -1.0)

    def test_negative_integer_order(self):
        self.assertAlmostEqual(sf.bessel_j(-1.0, 12.5), -sf.bessel_j(1.0, 12.5), delta=1e-15)

    @settings(max_examples=300, derandomize=True, deadline=None)
    @given(
        st.floats(min_value=-1.0, max_value=2.0),
        st.one_of(
            st.floats(min_value=1e-3, max_value=40.0),
            st.floats(min_value=40.0, max_value=1e5),
        ),
    )
    def test_matches_reference(self, nu, x):
        expected = special.jv(nu, x)
        self.assertLessEqual(abs(sf.bessel_j(nu, x) - expected), 1e-10 * abs(expected) + 1e-12)

    @settings(max_examples=100, derandomize=True, deadline=None)
    @given(st.floats(min_value=0.05, max_value=0.95), st.floats(min_value=0.1, max_value=200.0))
    def test_derivative_identity(self, nu, z):
        jp = sf.bessel_jp(nu, z)
        j = sf.bessel_j(nu, z)
        plus = j + (z / nu) * jp
        minus = j - (z / nu) * jp
        expected_plus = (z / nu) * sf.bessel_j(nu - 1.0, z)
        expected_minus = (z / nu) * sf.bessel_j(nu + 1.0, z)
        self.assertLessEqual(abs(plus - expected_plus), 1e-9 * max(1.0, abs(expected_plus)))
        self.assertLessEqual(abs(minus - expected_minus), 1e-9 * max(1.0, abs(expected_minus)))

    @settings(max_examples=100, derandomize=True, deadline=None)
    @given(st.floats(min_value=0.05, max_value=0.95), st.floats(min_value=0.1, max_value=1e4))
    def test_cross_product_identity(self, nu, z):
        lhs = sf.bessel_j(nu, z) * sf.bessel_j(1.0 - nu, z) + sf.bessel_j(-nu, z) * sf.bessel_j(nu - 1.0, z)
        self.assertAlmostEqual(lhs, 2.0 * math.sin(nu * math.pi) / (math.pi * z), delta=1e-10)

    def test_switchover_is_seamless(self):
        for row in sf.switchover_residuals():
            self.assertLess(row["residual"], 1e-10, row)

    def test_misplaced_switchover_breaks_cross_product(self):
        tampered = SpecialFunctionService(series_max_x=40.0)
        nu, z = 0.25, 35.0
        lhs = tampered.bessel_j(nu, z) * tampered.bessel_j(1.0 - nu, z) + tampered.bessel_j(-nu, z) * tampered.bessel_j(nu - 1.0, z)
        self.assertGreater(abs(lhs - 2.0 * math.sin(nu * math.pi) / (math.pi * z)), 1e-10)


class LegendreTests(SimpleTestCase):

    def test_classical_values(self):
        self.assertAlmostEqual(sf.assoc_legendre(1, 0, 1 / math.sqrt(2)), 1 / math.sqrt(2), places=15)
        self.assertAlmostEqual(sf.assoc_legendre(2, 2, 0.0), 3.0, places=15)
        self.assertAlmostEqual(sf.assoc_legendre(1, 1, 0.6), -0.8, places=15)

    def test_survival_factor_quarter(self):
        s = math.sin(math.pi / 4)
        self.assertAlmostEqual(s * sf.assoc_legendre(1, 0, s) ** 2, 1 / (2 * math.sqrt(2)), places=14)

    def test_order_above_degree_rejected(self):
        with self.assertRaises(DomainError):
            sf.assoc_legendre(2, 3, 0.1)

    def test_k0_matches_three_term_recurrence(self):
        x = 0.37
        p_prev, p_curr = 1.0, x
        for n in range(2, 31):
            p_prev, p_curr = p_curr, ((2 * n - 1) * x * p_curr - (n - 1) * p_prev) / n
            self.assertAlmostEqual(sf.assoc_legendre(n, 0, x), p_curr, delta=1e-12)

    def test_log_variant_matches_direct(self):
        for j, k, x in ((5, 2, 0.3), (12, 7, -0.8), (40, 40, 0.5), (30, 3, 0.999)):
            direct = sf.assoc_legendre(j, k, x)
            weight = sf.assoc_legendre_log(j, k, x)
            self.assertEqual(weight.sign, 1 if direct > 0 else -1)
            self.assertAlmostEqual(weight.log_magnitude, math.log(abs(direct)), delta=1e-11)

    def test_log_variant_survives_large_order(self):
        weight = sf.assoc_legendre_log(400, 300, 0.2)
        self.assertTrue(math.isfinite(weight.log_magnitude))
        self.assertGreater(weight.log_magnitude, 700.0)


class HypergeometricTests(SimpleTestCase):

    def test_empty_product(self):
        self.assertEqual(sf.hyp2f1_terminating(0, 2.5, 1.5, 0.3), 1.0)

    def test_two_terms(self):
        b, c, x = 2.0, 1.5, math.sin(math.pi / 8) ** 2
        self.assertAlmostEqual(sf.hyp2f1_terminating(-1, b, c, x), 1 - b * x / c, places=15)
        self.assertAlmostEqual(sf.hyp2f1_terminating(-1, 2.0, 1.5, x), 0.80474, places=5)

    def test_pole_rejected(self):
        with self.assertRaises(DomainError):
            sf.hyp2f1_terminating(-2, 1.0, 0.0, 0.2)

    def test_legendre_connection(self):
        for x in (-0.9, -0.31, 0.0, 0.42, 0.77, 0.99):
            for n in range(0, 21):
                expected = sf.assoc_legendre(n, 0, x)
                value = sf.hyp2f1_terminating(-n, n + 1.0, 1.0, (1.0 - x) / 2.0)
                self.assertAlmostEqual(value, expected, delta=1e-10)

    def test_heavy_cancellation_uses_exact_sum(self):
        # 멱 기저의 항들이 1e20 수준으로 상쇄되는 경우
        x = 1.0 / math.sqrt(10.0)
        expected = sf.assoc_legendre(50, 0, x)
        value = sf.hyp2f1_terminating(-50, 51.0, 1.0, (1.0 - x) / 2.0)
        self.assertAlmostEqual(value, expected, delta=1e-12)
