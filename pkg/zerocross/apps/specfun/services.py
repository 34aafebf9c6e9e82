"""
특수함수 커널

Gamma, 분수 차수 Bessel J, 연관 Legendre 다항식, 종결형 Gauss 초기하 급수,
로그 팩토리얼을 외부 특수함수 라이브러리 없이 구현한다.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from django.conf import settings
from numpy.polynomial.chebyshev import chebval

from apps.exceptions import DomainError, NumericalFailure

logger = logging.getLogger(__name__)

SQRT_TWO_PI = math.sqrt(2.0 * math.pi)
LANCZOS_G = 7.0
LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# J'_nu 계산에 nu-1 차수가 필요하므로 [-1, 2]보다 한 칸 넓게 허용
BESSEL_ORDER_RANGE = (-2.0, 3.0)
BESSEL_MAX_X = 1e5
EXACT_FACTORIAL_MAX = 20

# 절댓값 합 / 결과 비율이 이 값을 넘으면 유리수 정확 합산으로 전환
CANCELLATION_LIMIT = 1e2

LOG_RESCALE = 1e200

# x >= STIRLING_MIN_X 는 Stirling 급수 + Chebyshev 보정항
STIRLING_MIN_X = 10.0
LGAMMACOR_XBIG = 94906265.62425156
# log Gamma(x) - [(x-1/2) log x - x + log sqrt(2 pi)] 의 Chebyshev 계수 (x >= 10)
LGAMMACOR_COEFFICIENTS = (
    0.1666389480451863247205729650822e+0,
    -0.1384948176067563840732986059135e-4,
    0.9810825646924729426157171547487e-8,
    -0.1809129475572494194263306266719e-10,
    0.6221098041892605227126015543416e-13,
)


@dataclass(frozen=True)
class LogWeight:
    """부호 분리 로그 스케일 값: sign * exp(log_magnitude)"""
    log_magnitude: float
    sign: int = 1

    @classmethod
    def from_value(cls, value: float) -> "LogWeight":
        if value == 0.0:
            return cls(-math.inf, 1)
        return cls(math.log(abs(value)), 1 if value > 0 else -1)

    @property
    def is_zero(self) -> bool:
        return self.log_magnitude == -math.inf

    @property
    def value(self) -> float:
        if self.is_zero:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def __mul__(self, other: "LogWeight") -> "LogWeight":
        return LogWeight(self.log_magnitude + other.log_magnitude, self.sign * other.sign)

    def __truediv__(self, other: "LogWeight") -> "LogWeight":
        if other.is_zero:
            raise DomainError("0으로 나눌 수 없습니다")
        return LogWeight(self.log_magnitude - other.log_magnitude, self.sign * other.sign)

    def __pow__(self, exponent: int) -> "LogWeight":
        sign = self.sign if exponent % 2 else 1
        if self.is_zero:
            return LogWeight(-math.inf if exponent > 0 else 0.0, 1)
        return LogWeight(self.log_magnitude * exponent, sign)


def _sinpi(x: float) -> float:
    """sin(pi*x), 정수 근처에서도 상대 정확도 유지"""
    y = math.fmod(x, 2.0)
    if y < -1.0:
        y += 2.0
    elif y > 1.0:
        y -= 2.0
    if y > 0.5:
        y = 1.0 - y
    elif y < -0.5:
        y = -1.0 - y
    return math.sin(math.pi * y)


def _is_integer(x: float) -> bool:
    return x == math.floor(x)


def _lanczos_series(z: float) -> float:
    series = LANCZOS_COEFFICIENTS[0]
    for i in range(1, len(LANCZOS_COEFFICIENTS)):
        series += LANCZOS_COEFFICIENTS[i] / (z + i)
    return series


def _lanczos_gamma(x: float) -> float:
    z = x - 1.0
    t = z + LANCZOS_G + 0.5
    # t**(z+0.5)를 둘로 나눠 x~170 근처의 중간 오버플로 방지
    half_power = t ** ((z + 0.5) / 2.0)
    return SQRT_TWO_PI * half_power * (half_power * math.exp(-t)) * _lanczos_series(z)


def _lgammacor(x: float) -> float:
    """Stirling 보정항 (x >= 10), 1/(12x) - 1/(360x^3) + ..."""
    if x >= LGAMMACOR_XBIG:
        return 1.0 / (12.0 * x)
    u = 10.0 / x
    coefficients = (0.5 * LGAMMACOR_COEFFICIENTS[0],) + LGAMMACOR_COEFFICIENTS[1:]
    return float(chebval(2.0 * u * u - 1.0, coefficients)) / x


def _stirling_gamma(x: float) -> float:
    # x^(x-1/2) 를 둘로 나눠 중간 오버플로 방지
    half_power = x ** ((x - 0.5) / 2.0)
    return SQRT_TWO_PI * half_power * (half_power * math.exp(-x)) * math.exp(_lgammacor(x))


def _bessel_series(nu: float, x: float, reciprocal_gamma: float) -> float:
    """작은 x: sum_k (-1)^k (x/2)^(2k+nu) / (k! Gamma(k+nu+1))"""
    half = 0.5 * x
    term = half ** nu * reciprocal_gamma
    terms = [term]
    step = -half * half
    k = 0
    while True:
        k += 1
        term *= step / (k * (k + nu))
        terms.append(term)
        if k > half and abs(term) <= 1e-17 * abs(terms[0]):
            break
        if k > 500:
            raise NumericalFailure(f"Bessel 멱급수 미수렴: nu={nu}, x={x}")
    return math.fsum(terms)


def _bessel_hankel(nu: float, x: float) -> float:
    """큰 x: Hankel 점근 전개 P, Q (최적 절단)"""
    mu2 = 4.0 * nu * nu
    p_terms = [1.0]
    q_terms: list[float] = []
    term = 1.0
    k = 0
    while True:
        k += 1
        next_term = term * (mu2 - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if next_term == 0.0 or abs(next_term) < 1e-17:
            if next_term != 0.0:
                (q_terms if k % 2 else p_terms).append(next_term * (-1) ** (k // 2))
            break
        if abs(next_term) > abs(term):
            # 점근 급수가 발산하기 시작
            break
        term = next_term
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q_terms.append(sign * term)
        else:
            p_terms.append(sign * term)
        if k > 200:
            break
    p = math.fsum(p_terms)
    q = math.fsum(q_terms)

    # cos(x - a)를 전개해 큰 x의 위상 손실 방지
    shift = (0.5 * nu + 0.25) * math.pi
    cos_x, sin_x = math.cos(x), math.sin(x)
    cos_s, sin_s = math.cos(shift), math.sin(shift)
    cos_chi = cos_x * cos_s + sin_x * sin_s
    sin_chi = sin_x * cos_s - cos_x * sin_s
    return math.sqrt(2.0 / (math.pi * x)) * (p * cos_chi - q * sin_chi)


class SpecialFunctionService:
    """
    특수함수 계산 서비스

    Bessel 방법 전환 지점은 settings.ZEROCROSS에서 읽으며,
    생성자 인자로 덮어쓸 수 있다 (전환 지점 검증용).
    """

    def __init__(
        self,
        series_max_x: Optional[float] = None,
        asymptotic_min_x: Optional[float] = None,
    ):
        self._series_max_x = series_max_x
        self._asymptotic_min_x = asymptotic_min_x

    @property
    def series_max_x(self) -> float:
        if self._series_max_x is not None:
            return self._series_max_x
        return float(settings.ZEROCROSS["BESSEL_SERIES_MAX_X"])

    @property
    def asymptotic_min_x(self) -> float:
        if self._asymptotic_min_x is not None:
            return self._asymptotic_min_x
        return float(settings.ZEROCROSS["BESSEL_ASYMPTOTIC_MIN_X"])

    # ------------------------------------------------------------------
    # Gamma
    # ------------------------------------------------------------------

    def gamma_fn(self, x: float) -> float:
        """
        Gamma 함수

        x >= 10 은 Stirling 급수와 Chebyshev 보정항, [1/2, 10) 은 Lanczos g=7,
        x < 1/2 은 반사 공식.

        Args:
            x: 실수 인자 (0 이하 정수 제외)

        Returns:
            Gamma(x)

        Raises:
            DomainError: 비유한 값 또는 극점
        """
        if not math.isfinite(x):
            raise DomainError(f"Gamma 인자가 유한하지 않습니다: {x}")
        if x <= 0.0 and _is_integer(x):
            raise DomainError(f"Gamma 함수의 극점입니다: x={x}")
        if _is_integer(x) and x <= 171.0:
            return float(math.factorial(int(x) - 1))
        if x < 0.5:
            return math.pi / (_sinpi(x) * self.gamma_fn(1.0 - x))
        if x >= STIRLING_MIN_X:
            return _stirling_gamma(x)
        return _lanczos_gamma(x)

    def log_gamma(self, x: float) -> float:
        """양의 실수 x에 대한 log Gamma(x)"""
        if not math.isfinite(x) or x <= 0.0:
            raise DomainError(f"log_gamma는 양의 유한 인자만 허용합니다: {x}")
        if x < 0.5:
            return self.log_gamma(x + 1.0) - math.log(x)
        if x >= STIRLING_MIN_X:
            return math.log(SQRT_TWO_PI) + (x - 0.5) * math.log(x) - x + _lgammacor(x)
        z = x - 1.0
        t = z + LANCZOS_G + 0.5
        return (
            0.5 * math.log(2.0 * math.pi)
            + (z + 0.5) * math.log(t)
            - t
            + math.log(_lanczos_series(z))
        )

    def log_factorial(self, n: int) -> LogWeight:
        """log(n!), n <= 20은 정수 연산으로 정확"""
        if n < 0:
            raise DomainError(f"음수의 팩토리얼은 정의되지 않습니다: {n}")
        if n <= EXACT_FACTORIAL_MAX:
            return LogWeight(math.log(math.factorial(n)))
        return LogWeight(self.log_gamma(n + 1.0))

    def log_double_factorial(self, n: int) -> LogWeight:
        """log(n!!), (-1)!! = 0!! = 1"""
        if n < -1:
            raise DomainError(f"이중 팩토리얼 인자가 -1보다 작습니다: {n}")
        if n <= EXACT_FACTORIAL_MAX:
            return LogWeight(math.log(math.prod(range(n, 0, -2))))
        if n % 2 == 0:
            half = n // 2
            # (2k)!! = 2^k k!
            return LogWeight(half * math.log(2.0) + self.log_factorial(half).log_magnitude)
        half = (n + 1) // 2
        # (2k-1)!! = (2k)! / (2^k k!)
        return LogWeight(
            self.log_factorial(2 * half).log_magnitude
            - half * math.log(2.0)
            - self.log_factorial(half).log_magnitude
        )

    # ------------------------------------------------------------------
    # Bessel J
    # ------------------------------------------------------------------

    def bessel_j(self, nu: float, x: float) -> float:
        """
        제1종 Bessel 함수 J_nu(x)

        x <= series_max_x 는 멱급수, asymptotic_min_x 이상은 Hankel 점근 전개,
        그 사이는 Miller 역방향 점화식을 사용한다.

        Args:
            nu: 차수 ([-2, 3])
            x: 인자 ([0, 1e5])

        Returns:
            J_nu(x)

        Raises:
            DomainError: 범위를 벗어난 인자, 또는 x=0에서 음의 비정수 차수
        """
        self._check_bessel_args(nu, x)
        if x == 0.0:
            return self._bessel_at_zero(nu)
        if nu < 0.0 and _is_integer(nu):
            m = int(-nu)
            return (-1.0) ** m * self.bessel_j(float(m), x)
        if x <= self.series_max_x:
            return _bessel_series(nu, x, 1.0 / self.gamma_fn(nu + 1.0))
        if x >= self.asymptotic_min_x:
            return _bessel_hankel(nu, x)
        return self._bessel_miller(nu, x)

    def bessel_jp(self, nu: float, x: float) -> float:
        """J'_nu(x) = J_{nu-1}(x) - (nu/x) J_nu(x)"""
        if x <= 0.0:
            raise DomainError(f"J' 는 x > 0 에서만 계산합니다: x={x}")
        return self.bessel_j(nu - 1.0, x) - (nu / x) * self.bessel_j(nu, x)

    def _check_bessel_args(self, nu: float, x: float) -> None:
        if not (math.isfinite(nu) and math.isfinite(x)):
            raise DomainError(f"Bessel 인자가 유한하지 않습니다: nu={nu}, x={x}")
        low, high = BESSEL_ORDER_RANGE
        if not low <= nu <= high:
            raise DomainError(f"Bessel 차수 범위 [{low}, {high}] 밖입니다: nu={nu}")
        if x < 0.0:
            raise DomainError(f"Bessel 인자는 음수일 수 없습니다: x={x}")
        if x > BESSEL_MAX_X:
            raise DomainError(f"Bessel 인자가 {BESSEL_MAX_X:g}를 초과합니다: x={x}")

    @staticmethod
    def _bessel_at_zero(nu: float) -> float:
        if nu == 0.0:
            return 1.0
        if nu > 0.0 or _is_integer(nu):
            return 0.0
        raise DomainError(f"J_nu(0)은 음의 비정수 차수에서 발산합니다: nu={nu}")

    def _bessel_miller(self, nu: float, x: float) -> float:
        base = math.floor(nu)
        mu = nu - base
        ladder = self._miller_ladder(mu, x)
        if base >= 0:
            return ladder[int(base)]

        # J_{p-1} = (2p/x) J_p - J_{p+1}
        lower, upper = ladder[0], ladder[1]
        order = mu
        for _ in range(int(-base)):
            lower, upper = (2.0 * order / x) * lower - upper, lower
            order -= 1.0
        return lower

    def _miller_ladder(self, mu: float, x: float) -> list[float]:
        """J_mu .. J_{mu+3} (0 <= mu < 1) by backward recurrence"""
        start = 2 * ((int(1.5 * x) + 40) // 2)
        ladder = [0.0] * (start + 2)
        ladder[start] = 1e-30
        for k in range(start, 0, -1):
            ladder[k - 1] = (2.0 * (mu + k) / x) * ladder[k] - ladder[k + 1]
            if abs(ladder[k - 1]) > LOG_RESCALE:
                for i in range(k - 1, start + 1):
                    ladder[i] /= LOG_RESCALE

        if mu == 0.0:
            # 1 = J_0 + 2 sum_k J_{2k}
            norm = ladder[0] + 2.0 * math.fsum(ladder[2:start + 1:2])
            scale = 1.0 / norm
        else:
            # (x/2)^mu = sum_k (mu+2k) Gamma(mu+k)/k! J_{mu+2k}
            weight = self.gamma_fn(mu)
            terms = []
            for k in range(0, start // 2 + 1):
                if k > 0:
                    weight *= (mu + k - 1) / k
                terms.append((mu + 2 * k) * weight * ladder[2 * k])
            scale = (0.5 * x) ** mu / math.fsum(terms)
        return [ladder[i] * scale for i in range(4)]

    def switchover_residuals(
        self,
        orders: tuple[float, ...] = (-0.75, -0.25, 0.25, 0.5, 0.75, 1.5),
    ) -> list[dict]:
        """
        Bessel 방법 전환 지점에서 인접한 두 방법의 상대 차이

        Returns:
            [{"boundary", "nu", "x", "residual"}, ...]
        """
        rows = []
        x_low = self.series_max_x
        x_high = self.asymptotic_min_x
        for nu in orders:
            series = _bessel_series(nu, x_low, 1.0 / self.gamma_fn(nu + 1.0))
            miller = self._bessel_miller(nu, x_low)
            rows.append({
                "boundary": "series/miller",
                "nu": nu,
                "x": x_low,
                "residual": abs(series - miller) / max(abs(series), abs(miller), 1e-300),
            })
            miller = self._bessel_miller(nu, x_high)
            hankel = _bessel_hankel(nu, x_high)
            rows.append({
                "boundary": "miller/hankel",
                "nu": nu,
                "x": x_high,
                "residual": abs(miller - hankel) / max(abs(miller), abs(hankel), 1e-300),
            })
        return rows

    # ------------------------------------------------------------------
    # Legendre / 초기하
    # ------------------------------------------------------------------

    def assoc_legendre(self, j: int, k: int, x: float) -> float:
        """
        연관 Legendre 함수 P_j^k(x) (Ferrers, Condon-Shortley 위상 포함)

        P_k^k 에서 시작해 차수 j 방향 상향 점화식을 사용한다.

        Raises:
            DomainError: k > j, 음수 인자, |x| > 1
        """
        self._check_legendre_args(j, k, x)
        p_prev = 1.0
        if k > 0:
            root = math.sqrt((1.0 - x) * (1.0 + x))
            odd = 1.0
            for _ in range(k):
                p_prev *= -odd * root
                odd += 2.0
        if j == k:
            return p_prev
        p_curr = x * (2 * k + 1) * p_prev
        for degree in range(k + 2, j + 1):
            p_prev, p_curr = p_curr, ((2 * degree - 1) * x * p_curr - (degree + k - 1) * p_prev) / (degree - k)
        return p_curr

    def assoc_legendre_log(self, j: int, k: int, x: float) -> LogWeight:
        """assoc_legendre 의 로그 스케일 버전 (큰 j, k 에서 오버플로 없음)"""
        self._check_legendre_args(j, k, x)
        one_minus_x2 = (1.0 - x) * (1.0 + x)
        if k > 0 and one_minus_x2 == 0.0:
            return LogWeight(-math.inf, 1)

        log_scale = 0.0
        p_prev = 1.0
        if k > 0:
            log_scale = self.log_double_factorial(2 * k - 1).log_magnitude + 0.5 * k * math.log(one_minus_x2)
            p_prev = -1.0 if k % 2 else 1.0
        if j == k:
            return LogWeight(log_scale, int(p_prev))

        p_curr = x * (2 * k + 1) * p_prev
        for degree in range(k + 2, j + 1):
            p_prev, p_curr = p_curr, ((2 * degree - 1) * x * p_curr - (degree + k - 1) * p_prev) / (degree - k)
            peak = max(abs(p_prev), abs(p_curr))
            if peak > LOG_RESCALE:
                p_prev /= LOG_RESCALE
                p_curr /= LOG_RESCALE
                log_scale += math.log(LOG_RESCALE)
            elif 0.0 < peak < 1.0 / LOG_RESCALE:
                p_prev *= LOG_RESCALE
                p_curr *= LOG_RESCALE
                log_scale -= math.log(LOG_RESCALE)

        weight = LogWeight.from_value(p_curr)
        if weight.is_zero:
            return weight
        return LogWeight(weight.log_magnitude + log_scale, weight.sign)

    @staticmethod
    def _check_legendre_args(j: int, k: int, x: float) -> None:
        if j < 0 or k < 0:
            raise DomainError(f"Legendre 차수는 음수일 수 없습니다: j={j}, k={k}")
        if k > j:
            raise DomainError(f"Legendre 차수 조건 k <= j 위반: j={j}, k={k}")
        if not -1.0 <= x <= 1.0:
            raise DomainError(f"Legendre 인자는 [-1, 1] 범위여야 합니다: x={x}")

    def hyp2f1_terminating(self, neg_n: int, b: float, c: float, x: float) -> float:
        """
        종결형 Gauss 초기하 함수 F(-N, b; c; x)

        항을 크기 내림차순으로 정렬해 보정 합산한다. 상쇄가 심하면
        입력 float 값을 정확한 유리수로 보고 다시 합산한다.

        Args:
            neg_n: 0 이하 정수 (-N)
            b: 실수
            c: 양의 실수
            x: [0, 1)

        Raises:
            DomainError: 잘못된 인자 또는 c 극점
        """
        if neg_n > 0 or int(neg_n) != neg_n:
            raise DomainError(f"첫 번째 인자는 0 이하 정수여야 합니다: {neg_n}")
        if c <= 0.0:
            raise DomainError(f"c 는 양수여야 합니다 (극점): c={c}")
        if not 0.0 <= x < 1.0:
            raise DomainError(f"x 는 [0, 1) 범위여야 합니다: x={x}")

        n = int(-neg_n)
        terms = [1.0]
        term = 1.0
        for k in range(n):
            term *= (k - n) * (b + k) / ((c + k) * (k + 1)) * x
            terms.append(term)
        terms.sort(key=abs, reverse=True)
        value = math.fsum(terms)
        magnitude = math.fsum(abs(t) for t in terms)

        if magnitude > CANCELLATION_LIMIT * abs(value):
            logger.debug(
                "hyp2f1 exact summation: N=%d b=%g c=%g x=%.17g cancellation=%.3e",
                n, b, c, x, magnitude / abs(value) if value else math.inf,
            )
            value = float(_hyp2f1_exact(n, b, c, x))
        return value


def _hyp2f1_exact(n: int, b: float, c: float, x: float) -> Fraction:
    fb, fc, fx = Fraction(b), Fraction(c), Fraction(x)
    term = Fraction(1)
    total = Fraction(1)
    for k in range(n):
        term = term * (k - n) * (fb + k) * fx / ((fc + k) * (k + 1))
        total += term
    return total


special_function_service = SpecialFunctionService()
