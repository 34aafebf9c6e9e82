"""
양자 관측량: 2차 모멘트의 시간 발전, 에너지 분산, Mandel Q,
Fock 상태 전이 확률, 불변 스퀴징 계수

단위: hbar = m = 1
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from django.conf import settings
from scipy.optimize import minimize_scalar

from apps.exceptions import ConsistencyError, DomainError, NumericalFailure
from apps.integrator.services import BogoliubovPair, ModeState
from apps.specfun.services import LogWeight, SpecialFunctionService, special_function_service

logger = logging.getLogger(__name__)

# 두 확률 공식의 상대 불일치 한계
CROSS_CHECK_WARN = 1e-9
CROSS_CHECK_FAIL = 1e-6
CROSS_CHECK_FLOOR = 1e-15
VARIANCE_ROUTE_TOL = 1e-7
# Schrodinger-Robertson 하한 1/4 에 대한 반올림 여유
UNCERTAINTY_SLACK = 1e-9
SCAN_SAMPLES = 4096


@dataclass(frozen=True)
class MomentState:
    """<x^2>, <p^2>, <xp+px>"""
    xx: float
    pp: float
    xp_sym: float = 0.0

    def __post_init__(self):
        if not (self.xx > 0.0 and self.pp > 0.0):
            raise DomainError(f"<x^2>, <p^2> 는 양수여야 합니다: xx={self.xx}, pp={self.pp}")
        if self.D < 0.25 * (1.0 - UNCERTAINTY_SLACK):
            raise DomainError(f"불확정성 관계 위반: D={self.D} < 1/4")

    @property
    def D(self) -> float:
        """보편 불변량 xx pp - (xp_sym/2)^2"""
        return self.xx * self.pp - 0.25 * self.xp_sym ** 2

    @classmethod
    def vacuum(cls, omega: float = 1.0) -> "MomentState":
        return cls(0.5 / omega, 0.5 * omega, 0.0)

    @classmethod
    def fock(cls, N: int, omega: float = 1.0) -> "MomentState":
        return cls((N + 0.5) / omega, (N + 0.5) * omega, 0.0)


@dataclass(frozen=True)
class SqueezingParams:
    """E = lambda omega / 2, D = gamma^2 / 4"""
    lam: float
    gamma: float

    def __post_init__(self):
        if self.gamma < 1.0 - UNCERTAINTY_SLACK:
            raise DomainError(f"gamma 는 1 이상이어야 합니다: {self.gamma}")
        if self.lam < self.gamma * (1.0 - UNCERTAINTY_SLACK):
            raise DomainError(f"lambda >= gamma 여야 합니다: lambda={self.lam}, gamma={self.gamma}")


@dataclass
class FockDistribution:
    """
    초기 Fock 상태 |N> 에서 최종 |M> 으로의 확률표

    probs 는 M 오름차순이며 |M - N| 이 홀수인 항은 담지 않는다.
    """
    N: int
    probs: dict[int, float]
    tail_mass: float

    @property
    def levels(self) -> np.ndarray:
        return np.fromiter(self.probs.keys(), dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.fromiter(self.probs.values(), dtype=float)

    @property
    def total(self) -> float:
        return math.fsum(self.probs.values())

    def mass_at_or_above(self, M: int) -> float:
        return math.fsum(p for level, p in self.probs.items() if level >= M)


@dataclass(frozen=True)
class DistributionMoments:
    """확률표에서 직접 계산한 모멘트"""
    mean_n: float
    variance_n: float
    mandel_q: float
    first_level_moment: float
    level_variance: float


@dataclass(frozen=True)
class EnergyVariance:
    """
    Fock 상태의 영점 통과 후 에너지 분산

    ratio_to_adiabatic 은 통과가 없을 때의 에너지 omega (N + 1/2) 로,
    ratio_to_mean 은 실제 평균 에너지로 나눈 값이다.
    """
    N: int
    omega: float
    mean: float
    variance: float
    ratio_to_adiabatic: float
    ratio_to_mean: float


@dataclass(frozen=True)
class VarianceReport:
    """세 가지 경로로 계산한 에너지 분산"""
    N: int
    closed_form: float
    operator_route: float
    distribution_route: float
    max_relative_gap: float
    consistent: bool = field(default=True)


class QuantumService:
    """양자 관측량 서비스"""

    def __init__(self, special_functions: Optional[SpecialFunctionService] = None):
        self.sf = special_functions or special_function_service

    # ------------------------------------------------------------------
    # 모멘트와 에너지
    # ------------------------------------------------------------------

    def evolve_moments(self, initial: MomentState, mode: ModeState, omega0: float = 1.0) -> MomentState:
        """
        모드 함수로 2차 모멘트를 발전

        x(t) = x0 sqrt(w0) Re(eps) + p0 Im(eps) / sqrt(w0)
        """
        re_e, im_e = mode.eps.real, mode.eps.imag
        re_d, im_d = mode.deps.real, mode.deps.imag
        xx0, pp0, s0 = initial.xx, initial.pp, initial.xp_sym
        xx = omega0 * xx0 * re_e ** 2 + (pp0 / omega0) * im_e ** 2 + s0 * re_e * im_e
        pp = omega0 * xx0 * re_d ** 2 + (pp0 / omega0) * im_d ** 2 + s0 * re_d * im_d
        xp = (
            2.0 * omega0 * xx0 * re_e * re_d
            + 2.0 * (pp0 / omega0) * im_e * im_d
            + s0 * (re_e * im_d + im_e * re_d)
        )
        return MomentState(xx, pp, xp)

    @staticmethod
    def mean_energy(moments: MomentState, omega: float) -> float:
        """E = (<p^2> + omega^2 <x^2>) / 2"""
        if omega < 0.0:
            raise DomainError(f"omega 는 0 이상이어야 합니다: {omega}")
        return 0.5 * (moments.pp + omega ** 2 * moments.xx)

    @staticmethod
    def energy_ratio_special(mode: ModeState, omega: float) -> float:
        """특수 상태 (<p^2> = w0^2 <x^2>, <xp+px> = 0) 의 E(t)/E(-tau)"""
        return 0.5 * (omega ** 2 * abs(mode.eps) ** 2 + abs(mode.deps) ** 2)

    # ------------------------------------------------------------------
    # Fock 전이 확률
    # ------------------------------------------------------------------

    def _legendre_form(self, N: int, M: int, u_plus: float) -> LogWeight:
        low, high = min(N, M), max(N, M)
        degree, order = (M + N) // 2, abs(M - N) // 2
        legendre = self.sf.assoc_legendre_log(degree, order, 1.0 / u_plus)
        if legendre.is_zero:
            return legendre
        log_p = (
            self.sf.log_factorial(low).log_magnitude
            - self.sf.log_factorial(high).log_magnitude
            - math.log(u_plus)
            + 2.0 * legendre.log_magnitude
        )
        return LogWeight(log_p)

    def _hypergeometric_form(self, N: int, M: int, u_plus: float, u_minus: float) -> LogWeight:
        low, high = min(N, M), max(N, M)
        d = abs(M - N)
        half = d // 2
        if d > 0 and u_minus == 0.0:
            return LogWeight(-math.inf)
        z = (u_plus - 1.0) / (2.0 * u_plus)
        series = LogWeight.from_value(self.sf.hyp2f1_terminating(-low, high + 1.0, half + 1.0, z))
        if series.is_zero:
            return series
        log_p = (
            math.log(2.0)
            + self.sf.log_factorial(high).log_magnitude
            + (d * math.log(u_minus) if d else 0.0)
            - self.sf.log_factorial(low).log_magnitude
            - 2.0 * self.sf.log_factorial(half).log_magnitude
            - (d + 1) * math.log(2.0 * u_plus)
            + 2.0 * series.log_magnitude
        )
        return LogWeight(log_p)

    @staticmethod
    def _check_levels(N: int, M: int) -> None:
        if N < 0 or M < 0 or int(N) != N or int(M) != M:
            raise DomainError(f"Fock 준위는 0 이상 정수여야 합니다: N={N}, M={M}")

    def fock_transition_prob(self, N: int, M: int, pair: BogoliubovPair) -> float:
        """
        |<M|N>_t|^2

        Legendre 형태와 초기하 형태를 모두 로그 공간에서 계산해 교차 검증한다.

        Raises:
            DomainError: 음수 준위
            ConsistencyError: 두 형태가 1e-6 (상대) 이상 불일치
        """
        self._check_levels(N, M)
        if (M - N) % 2:
            return 0.0
        u_plus, u_minus = abs(pair.u_plus), abs(pair.u_minus)
        if u_minus == 0.0:
            return 1.0 if M == N else 0.0

        legendre = self._legendre_form(N, M, u_plus).value
        hypergeometric = self._hypergeometric_form(N, M, u_plus, u_minus).value
        self._cross_check(legendre, hypergeometric, f"N={N}, M={M}")
        return min(max(legendre, 0.0), 1.0)

    @staticmethod
    def _cross_check(a: float, b: float, label: str) -> None:
        scale = max(abs(a), abs(b))
        gap = abs(a - b)
        if gap > CROSS_CHECK_FAIL * scale + CROSS_CHECK_FLOOR:
            raise ConsistencyError(f"전이 확률 공식 불일치 ({label}): {a!r} vs {b!r}")
        if gap > CROSS_CHECK_WARN * scale + CROSS_CHECK_FLOOR:
            logger.warning("transition probability forms differ by %.3e (%s)", gap / scale, label)

    def fock_transition_prob_single_crossing(self, N: int, M: int, n: float) -> float:
        """
        한 번의 멱 프로파일 통과 후 |<M|N>|^2 (nu 로 직접 표현한 형태)
        """
        self._check_levels(N, M)
        if not n > 0:
            raise DomainError(f"멱 지수 n 은 양수여야 합니다: {n}")
        if (M - N) % 2:
            return 0.0
        nu = 1.0 / (n + 2.0)
        low, high = min(N, M), max(N, M)
        d = abs(M - N)
        half = d // 2
        z = math.sin((1.0 - 2.0 * nu) * math.pi / 4.0) ** 2
        series = self.sf.hyp2f1_terminating(-low, high + 1.0, half + 1.0, z)
        if series == 0.0:
            return 0.0
        log_p = (
            self.sf.log_factorial(high).log_magnitude
            + math.log(math.sin(nu * math.pi))
            + d * math.log(math.cos(nu * math.pi))
            - self.sf.log_factorial(low).log_magnitude
            - 2.0 * self.sf.log_factorial(half).log_magnitude
            - d * math.log(2.0)
            + 2.0 * math.log(abs(series))
        )
        return math.exp(log_p)

    def survival_probability(self, N: int, pair: BogoliubovPair) -> float:
        """|<N|N>_t|^2 = |u+|^-1 P_N(1/|u+|)^2"""
        self._check_levels(N, N)
        x = 1.0 / abs(pair.u_plus)
        return x * self.sf.assoc_legendre(N, 0, x) ** 2

    def vacuum_to_even(self, K: int, pair: BogoliubovPair) -> float:
        """|<2K|0>_t|^2 = (2K-1)!!/(2K)!! |u-|^{2K} / |u+|^{2K+1}"""
        self._check_levels(0, K)
        u_plus, u_minus = abs(pair.u_plus), abs(pair.u_minus)
        if K == 0:
            return 1.0 / u_plus
        if u_minus == 0.0:
            return 0.0
        ratio = self.sf.log_double_factorial(2 * K - 1) / self.sf.log_double_factorial(2 * K)
        log_p = ratio.log_magnitude + 2 * K * math.log(u_minus) - (2 * K + 1) * math.log(u_plus)
        return math.exp(log_p)

    def fock_distribution(
        self,
        N: int,
        pair: BogoliubovPair,
        tail_bound: Optional[float] = None,
    ) -> FockDistribution:
        """
        M = N mod 2, N mod 2 + 2, ... 순서로 누적 확률이 1 - tail_bound 에 이를 때까지 열거

        Raises:
            DomainError: tail_bound 범위 밖
            NumericalFailure: 항 수가 상한을 넘음
        """
        config = settings.ZEROCROSS
        tail = float(config["TAIL_BOUND"]) if tail_bound is None else float(tail_bound)
        if not 0.0 < tail <= 1e-6:
            raise DomainError(f"tail_bound 는 (0, 1e-6] 범위여야 합니다: {tail}")
        self._check_levels(N, N)
        max_terms = int(config["FOCK_MAX_TERMS"])

        probs: dict[int, float] = {}
        cumulative = 0.0
        M = N % 2
        while cumulative < 1.0 - tail:
            if len(probs) >= max_terms:
                raise NumericalFailure(
                    f"Fock 분포 열거가 {max_terms} 항을 넘었습니다 (|u-|={abs(pair.u_minus):g})",
                    error_estimate=1.0 - cumulative,
                )
            p = self.fock_transition_prob(N, M, pair)
            probs[M] = p
            cumulative += p
            M += 2
        distribution = FockDistribution(N, probs, max(0.0, 1.0 - math.fsum(probs.values())))
        logger.debug("fock distribution N=%d: %d levels, tail %.3e", N, len(probs), distribution.tail_mass)
        return distribution

    def distribution_moments(self, distribution: FockDistribution) -> DistributionMoments:
        """
        확률표의 평균, 분산, Mandel Q

        Raises:
            DomainError: 평균 점유수 0 (Mandel Q 정의 불가)
        """
        levels, weights = distribution.levels, distribution.weights
        mean_n = math.fsum(levels * weights)
        second = math.fsum(levels ** 2 * weights)
        variance = second - mean_n ** 2
        if mean_n <= 0.0:
            raise DomainError("평균 점유수가 0 이어서 Mandel Q 를 정의할 수 없습니다")
        first_level = mean_n + 0.5 * distribution.total
        level_second = math.fsum((levels + 0.5) ** 2 * weights)
        return DistributionMoments(
            mean_n=mean_n,
            variance_n=variance,
            mandel_q=variance / mean_n - 1.0,
            first_level_moment=first_level,
            level_variance=level_second - first_level ** 2,
        )

    # ------------------------------------------------------------------
    # 에너지 분산, Mandel Q
    # ------------------------------------------------------------------

    def energy_variance_fock(self, N: int, pair: BogoliubovPair, omega: float = 1.0) -> EnergyVariance:
        """sigma_E = 2 omega^2 |u+ u-|^2 (N^2 + N + 1)"""
        self._check_levels(N, N)
        product = abs(pair.u_plus * pair.u_minus) ** 2
        variance = 2.0 * omega ** 2 * product * (N * N + N + 1)
        mean = omega * pair.beta * (N + 0.5)
        return EnergyVariance(
            N=N,
            omega=omega,
            mean=mean,
            variance=variance,
            ratio_to_adiabatic=2.0 * product * (N * N + N + 1) / (N * N + N + 0.25),
            ratio_to_mean=variance / mean ** 2 if mean else 0.0,
        )

    def mandel_q(self, N: int, pair: BogoliubovPair) -> float:
        """
        Q = [|u-|^2 (1 + 2|u-|^2) + N (2|u-|^4 - 1) + 2 N^2 |u+ u-|^2] / [N + 2|u-|^2 (N + 1/2)]

        Raises:
            DomainError: N=0 이고 u-=0 (평균 점유수 0)
        """
        self._check_levels(N, N)
        v = abs(pair.u_minus) ** 2
        denominator = N + 2.0 * v * (N + 0.5)
        if denominator <= 0.0:
            raise DomainError("진공에서 u-=0 이면 Mandel Q 가 정의되지 않습니다")
        numerator = v * (1.0 + 2.0 * v) + N * (2.0 * v * v - 1.0) + 2.0 * N * N * abs(pair.u_plus * pair.u_minus) ** 2
        return numerator / denominator

    @staticmethod
    def fock_moments(N: int) -> dict:
        """|N> (omega=1) 의 4차 모멘트"""
        return {
            "x4": 0.75 * (2 * N * N + 2 * N + 1),
            "x2p2_sym": 0.5 * (2 * N * N + 2 * N - 1),
            "xp_sym_sq": 2.0 * (N * N + N + 1),
        }

    def moment_variance_check(
        self,
        N: int,
        pair: BogoliubovPair,
        omega: float = 1.0,
        tail_bound: Optional[float] = None,
    ) -> VarianceReport:
        """
        에너지 분산을 닫힌 형태, 연산자 모멘트 경로, 확률표 경로로 계산해 비교

        Raises:
            ConsistencyError: 상대 차이 1e-7 초과
        """
        closed = self.energy_variance_fock(N, pair, omega).variance

        moments = self.fock_moments(N)
        product = pair.u_plus * pair.u_minus
        A = 2.0 * omega * (abs(pair.u_plus) ** 2 + abs(pair.u_minus) ** 2)
        B = 4.0 * omega * product.real
        C = 4.0 * omega * product.imag
        second = (
            2.0 * moments["x4"] * (A * A + B * B)
            + moments["x2p2_sym"] * (A * A - B * B)
            + moments["xp_sym_sq"] * C * C
        ) / 16.0
        mean = A * (2 * N + 1) / 4.0
        operator = second - mean * mean

        distribution = self.fock_distribution(N, pair, tail_bound)
        stats = self.distribution_moments(distribution) if (N > 0 or abs(pair.u_minus) > 0) else None
        from_table = omega ** 2 * stats.level_variance if stats else 0.0

        floor = 1e-12 * mean * mean
        scale = max(abs(closed), abs(operator), abs(from_table))
        gap = max(abs(closed - operator), abs(closed - from_table), abs(operator - from_table))
        relative = gap / scale if scale > floor else 0.0
        report = VarianceReport(N, closed, operator, from_table, relative, relative <= VARIANCE_ROUTE_TOL)
        if gap > VARIANCE_ROUTE_TOL * scale + floor:
            raise ConsistencyError(
                f"에너지 분산 경로 불일치 (N={N}): closed={closed!r}, operator={operator!r}, table={from_table!r}"
            )
        return report

    # ------------------------------------------------------------------
    # 스퀴징
    # ------------------------------------------------------------------

    @staticmethod
    def squeezing_invariant(params: SqueezingParams) -> float:
        """s = lambda - sqrt(lambda^2 - gamma^2)"""
        lam, gamma = params.lam, params.gamma
        return lam - math.sqrt(max(lam * lam - gamma * gamma, 0.0))

    @staticmethod
    def squeezing_after_crossing(lam: float, beta: float) -> float:
        """특수 상태가 영점을 통과한 뒤: s = lambda / (beta + sqrt(beta^2 - 1))"""
        if lam < 1.0 - UNCERTAINTY_SLACK:
            raise DomainError(f"lambda 는 1 이상이어야 합니다: {lam}")
        if beta < 1.0:
            raise DomainError(f"beta 는 1 이상이어야 합니다: {beta}")
        return lam / (beta + math.sqrt(beta * beta - 1.0))

    @staticmethod
    def squeezing_single_crossing(lam: float, n: float) -> float:
        """멱 프로파일 한 번 통과: lambda tan^2(nu pi / 2)"""
        if not n > 0:
            raise DomainError(f"멱 지수 n 은 양수여야 합니다: {n}")
        nu = 1.0 / (n + 2.0)
        return lam * math.tan(0.5 * nu * math.pi) ** 2

    def squeezing_params(self, moments: MomentState, omega: float) -> SqueezingParams:
        """E = lambda omega / 2, D = gamma^2 / 4"""
        if not omega > 0.0:
            raise DomainError(f"omega 는 양수여야 합니다: {omega}")
        return SqueezingParams(2.0 * self.mean_energy(moments, omega) / omega, 2.0 * math.sqrt(moments.D))

    @staticmethod
    def min_coordinate_variance_scan(moments: MomentState, omega: float, samples: int = SCAN_SAMPLES) -> float:
        """
        자유 진동 동안의 sigma_x 최솟값 / 진공 값

        omega t in [0, pi) 격자 탐색 후 bounded Brent 로 세밀화
        """
        if not omega > 0.0:
            raise DomainError(f"omega 는 양수여야 합니다: {omega}")

        def sigma_x(theta):
            c, s = np.cos(theta), np.sin(theta)
            return moments.xx * c * c + moments.pp / omega ** 2 * s * s + moments.xp_sym / omega * s * c

        thetas = math.pi * np.arange(samples) / samples
        values = sigma_x(thetas)
        best = int(np.argmin(values))
        step = math.pi / samples
        result = minimize_scalar(
            lambda theta: float(sigma_x(theta)),
            bounds=(thetas[best] - step, thetas[best] + step),
            method="bounded",
            options={"xatol": 1e-12},
        )
        minimum = min(float(values[best]), float(result.fun))
        return minimum * 2.0 * omega


quantum_service = QuantumService()
