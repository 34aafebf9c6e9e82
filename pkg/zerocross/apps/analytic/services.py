"""
멱 프로파일의 정확한 Bessel 해와 단열 극한

멱 프로파일 f(T) = |T|^n 에서 epsilon(t) 는 차수 +-nu 인 Bessel 함수로 닫힌 형태가 있다.
nu = 1/(n+2), gamma = 1/(2 nu), g = 2 G nu, y(T) = g |T|^gamma.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

from apps.exceptions import DomainError
from apps.integrator.services import BogoliubovPair, ModeState
from apps.specfun.services import SpecialFunctionService, special_function_service

logger = logging.getLogger(__name__)

# specfun 의 Bessel 인자 상한
MAX_G = 1e5
# 이보다 큰 인자에서는 sinh, cosh 대신 지수 형태로 계산
TANH_LOG_FORM_MIN = 20.0


@dataclass(frozen=True)
class PowerSolutionParams:
    """멱 지수 n 과 단열 파라미터 G 로 정해지는 Bessel 해의 파라미터"""
    n: float
    G: float
    nu: float = field(init=False)
    gamma_exp: float = field(init=False)
    g: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.n) and self.n > 0):
            raise DomainError(f"멱 지수 n 은 양수여야 합니다: n={self.n}")
        if not (math.isfinite(self.G) and self.G > 0):
            raise DomainError(f"G 는 양수여야 합니다: G={self.G}")
        nu = 1.0 / (self.n + 2.0)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "gamma_exp", 1.0 / (2.0 * nu))
        object.__setattr__(self, "g", 2.0 * self.G * nu)

    @classmethod
    def from_nu_g(cls, nu: float, g: float) -> "PowerSolutionParams":
        if not 0.0 < nu < 0.5:
            raise DomainError(f"nu 는 (0, 1/2) 범위여야 합니다: nu={nu}")
        return cls(n=1.0 / nu - 2.0, G=g / (2.0 * nu))

    def y(self, T: float) -> float:
        return self.g * abs(T) ** self.gamma_exp


@dataclass(frozen=True)
class BesselCoefficients:
    """T<0 (minus), T>0 (plus) 구간의 계수. A_plus = -A_minus, B_plus = B_minus"""
    A_minus: complex
    B_minus: complex
    A_plus: complex
    B_plus: complex


@dataclass(frozen=True)
class _BesselQuad:
    """한 인자에서의 J_nu, J_-nu, J_{nu-1}, J_{1-nu}"""
    j_nu: float
    j_minus_nu: float
    j_nu_minus_1: float
    j_one_minus_nu: float

    @property
    def k_plus(self) -> float:
        return self.j_nu ** 2 + self.j_nu_minus_1 ** 2

    @property
    def k_minus(self) -> float:
        return self.j_minus_nu ** 2 + self.j_one_minus_nu ** 2

    @property
    def k_zero(self) -> float:
        return self.j_nu_minus_1 * self.j_one_minus_nu - self.j_nu * self.j_minus_nu


class AnalyticService:
    """
    닫힌 형태의 해와 점근 공식

    specfun 서비스를 주입받아 전환 지점을 바꾼 커널로도 계산할 수 있다.
    """

    def __init__(self, special_functions: Optional[SpecialFunctionService] = None):
        self.sf = special_functions or special_function_service

    def _quad(self, nu: float, x: float) -> _BesselQuad:
        j = self.sf.bessel_j
        return _BesselQuad(j(nu, x), j(-nu, x), j(nu - 1.0, x), j(1.0 - nu, x))

    @staticmethod
    def _check_g(g: float) -> None:
        if not (math.isfinite(g) and 0.0 < g <= MAX_G):
            raise DomainError(f"g 는 (0, {MAX_G:g}] 범위여야 합니다: g={g}")

    def bessel_coefficients(self, params: PowerSolutionParams) -> BesselCoefficients:
        """
        epsilon(-1) = 1, d epsilon/dt(-1) = i 를 만족하는 계수

        Raises:
            DomainError: g 가 Bessel 커널의 범위를 벗어난 경우
        """
        self._check_g(params.g)
        nu = params.nu
        quad = self._quad(nu, params.g)
        prefactor = nu * math.pi * math.sqrt(params.G) / math.sin(nu * math.pi)
        A_minus = prefactor * complex(quad.j_one_minus_nu, -quad.j_minus_nu)
        B_minus = prefactor * complex(quad.j_nu_minus_1, quad.j_nu)
        # t=0 에서 epsilon 과 그 도함수의 연속성
        return BesselCoefficients(A_minus, B_minus, -A_minus, B_minus)

    def asymptotic_coefficients(self, params: PowerSolutionParams) -> BesselCoefficients:
        """g >> 1 에서의 A-, B- 선행 항"""
        nu, g = params.nu, params.g
        modulus = math.sqrt(nu * math.pi) / math.sin(nu * math.pi)
        A_minus = modulus * cmath.exp(1j * (g + 0.5 * nu * math.pi - 0.75 * math.pi))
        B_minus = modulus * cmath.exp(1j * (g - 0.5 * nu * math.pi + 0.25 * math.pi))
        return BesselCoefficients(A_minus, B_minus, -A_minus, B_minus)

    def epsilon_power(
        self,
        params: PowerSolutionParams,
        T: float,
        coefficients: Optional[BesselCoefficients] = None,
    ) -> ModeState:
        """
        정확한 모드 함수 (epsilon, d epsilon/dt)

        T=0 에서는 A 항이 사라지는 극한값을 쓴다.

        Args:
            params: Bessel 해 파라미터
            T: 무차원 시간 ([-1, 1])
            coefficients: 미리 계산한 계수 (반복 호출 시)

        Raises:
            DomainError: T 가 [-1, 1] 밖
        """
        if not -1.0 <= T <= 1.0:
            raise DomainError(f"T 는 [-1, 1] 범위여야 합니다: T={T}")
        c = coefficients or self.bessel_coefficients(params)
        nu, G, g = params.nu, params.G, params.g

        if T == 0.0:
            eps = c.B_minus * math.sqrt(G) * (0.5 * g) ** -nu / self.sf.gamma_fn(1.0 - nu)
            deps = c.A_plus * (0.5 * g) ** nu / (math.sqrt(G) * self.sf.gamma_fn(1.0 + nu))
            return ModeState(T, eps, deps)

        y = params.y(T)
        quad = self._quad(nu, y)
        root = math.sqrt(G * abs(T))
        if T < 0.0:
            A, B = c.A_minus, c.B_minus
            deps = y / (2.0 * nu * root) * (B * quad.j_one_minus_nu - A * quad.j_nu_minus_1)
        else:
            A, B = c.A_plus, c.B_plus
            deps = y / (2.0 * nu * root) * (A * quad.j_nu_minus_1 - B * quad.j_one_minus_nu)
        eps = root * (A * quad.j_nu + B * quad.j_minus_nu)
        return ModeState(T, eps, deps)

    def energy_ratio_curve(self, params: PowerSolutionParams, T: float) -> float:
        """
        위상 평균 에너지 비 R(T)

        (1/8)(g pi / sin)^2 |T|^{n+1} [K-(g)K+(y) + K+(g)K-(y) -+ 2 K0(g)K0(y)],
        T<0 은 빼기, T>0 은 더하기. T=0 은 정확한 극한.
        """
        if not -1.0 <= T <= 1.0:
            raise DomainError(f"T 는 [-1, 1] 범위여야 합니다: T={T}")
        self._check_g(params.g)
        if T == 0.0:
            return self.r_at_crossing(params)
        nu, g = params.nu, params.g
        at_g = self._quad(nu, g)
        at_y = self._quad(nu, params.y(T))
        sign = -1.0 if T < 0.0 else 1.0
        bracket = (
            at_g.k_minus * at_y.k_plus
            + at_g.k_plus * at_y.k_minus
            + sign * 2.0 * at_g.k_zero * at_y.k_zero
        )
        scale = (g * math.pi / math.sin(nu * math.pi)) ** 2 / 8.0
        return scale * abs(T) ** (params.n + 1.0) * bracket

    def r_at_crossing(self, params: PowerSolutionParams) -> float:
        """R(0) = (1/8)(g pi/sin)^2 K-(g) (g/2)^{2nu-2} / Gamma(nu)^2"""
        self._check_g(params.g)
        nu, g = params.nu, params.g
        at_g = self._quad(nu, g)
        scale = (g * math.pi / math.sin(nu * math.pi)) ** 2 / 8.0
        return scale * at_g.k_minus * (0.5 * g) ** (2.0 * nu - 2.0) / self.sf.gamma_fn(nu) ** 2

    def r_at_crossing_asymptotic(self, nu: float, g: float) -> float:
        """g >> 1 에서 R(0) = pi g^{2nu-1} / [2^nu Gamma(nu) sin(pi nu)]^2"""
        denominator = 2.0 ** nu * self.sf.gamma_fn(nu) * math.sin(math.pi * nu)
        return math.pi * g ** (2.0 * nu - 1.0) / denominator ** 2

    @staticmethod
    def adiabatic_validity_floor(nu: float, g: float) -> float:
        """영점 이후 단열 법칙이 성립하려면 omega/omega_0 가 이 값보다 훨씬 커야 한다"""
        return g ** (2.0 * nu - 1.0)

    def rho_of_g(self, nu: float, g: float) -> float:
        """최종 시각 T=1 의 에너지 비: (1/4)(g pi/sin)^2 [K-(g)K+(g) + K0(g)^2]"""
        if not 0.0 < nu < 0.5:
            raise DomainError(f"nu 는 (0, 1/2) 범위여야 합니다: nu={nu}")
        self._check_g(g)
        at_g = self._quad(nu, g)
        scale = (g * math.pi / math.sin(nu * math.pi)) ** 2 / 4.0
        return scale * (at_g.k_minus * at_g.k_plus + at_g.k_zero ** 2)

    @staticmethod
    def _nu(n: float) -> float:
        if not (math.isfinite(n) and n > 0):
            raise DomainError(f"멱 지수 n 은 양수여야 합니다: n={n}")
        return 1.0 / (n + 2.0)

    def beta_single(self, n: float) -> float:
        """beta = (1 + cos^2(nu pi)) / sin^2(nu pi)"""
        nu = self._nu(n)
        s, c = math.sin(nu * math.pi), math.cos(nu * math.pi)
        return (1.0 + c * c) / (s * s)

    def u_pair_single(self, n: float) -> BogoliubovPair:
        """
        한 번의 영점 통과: u+ = 1/sin(nu pi), u- = i cot(nu pi)

        위상은 순수 멱 프로파일에서의 값이다. 다른 프로파일에서는 크기만 보편적이다.
        """
        nu = self._nu(n)
        s, c = math.sin(nu * math.pi), math.cos(nu * math.pi)
        return BogoliubovPair(complex(1.0 / s), complex(0.0, c / s))

    @staticmethod
    def beta_asymptotics(n: float) -> dict:
        """n << 1 과 n >> 1 극한"""
        return {"small_n": 1.0, "large_n": 2.0 * (n / math.pi) ** 2}

    def tanh_v_minus(self, omega_tilde: float) -> complex:
        """
        tanh^2 프로파일의 v-

        omega_tilde < 1/4: i cos(pi sqrt(1/4 - 4 w^2)) / sinh(2 pi w)
        omega_tilde > 1/4: i cosh(pi sqrt(4 w^2 - 1/4)) / sinh(2 pi w)

        Raises:
            DomainError: omega_tilde <= 0
        """
        if not (math.isfinite(omega_tilde) and omega_tilde > 0.0):
            raise DomainError(f"omega_tilde 는 양수여야 합니다: {omega_tilde}")
        B = 2.0 * math.pi * omega_tilde
        radicand = 4.0 * omega_tilde ** 2 - 0.25
        if radicand <= 0.0:
            return complex(0.0, math.cos(math.pi * math.sqrt(-radicand)) / math.sinh(B))
        A = math.pi * math.sqrt(radicand)
        if B < TANH_LOG_FORM_MIN:
            return complex(0.0, math.cosh(A) / math.sinh(B))
        ratio = math.exp(A - B) * (1.0 + math.exp(-2.0 * A)) / -math.expm1(-2.0 * B)
        return complex(0.0, ratio)

    def tanh_pair_adiabatic(self, omega_tilde: float) -> BogoliubovPair:
        """
        (u+, u-) = (sqrt(1 + |v-|^2) e^{-4 i w ln 2}, v-)

        u+ 의 위상은 큰 omega_tilde 의 점근값이다.
        """
        v_minus = self.tanh_v_minus(omega_tilde)
        modulus = math.sqrt(1.0 + abs(v_minus) ** 2)
        return BogoliubovPair(modulus * cmath.exp(-4j * omega_tilde * math.log(2.0)), v_minus)


analytic_service = AnalyticService()
