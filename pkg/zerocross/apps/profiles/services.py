"""
무차원 주파수 프로파일 f(T) = omega^2(t) / omega_0^2
"""

import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from django.conf import settings
from scipy.integrate import quad

from apps.exceptions import DomainError, NumericalFailure

logger = logging.getLogger(__name__)

QUAD_LIMIT = 200


class ProfileKind(str, Enum):
    POWER = "power"
    TANH_POWER = "tanh"
    SIN2 = "sin2"
    EPSTEIN_ECKART = "ee"


# 프로파일 종류별 허용 파라미터
PROFILE_KEYS = {
    ProfileKind.POWER: {"n"},
    ProfileKind.TANH_POWER: {"n", "a"},
    ProfileKind.SIN2: set(),
    ProfileKind.EPSTEIN_ECKART: {"a"},
}


@dataclass(frozen=True)
class FrequencyProfile:
    """
    이름과 파라미터로 정해지는 f(T) 형태

    Power:          |T|^n
    TanhPower:      |tanh(aT) / tanh(-a)|^n
    Sin2:           sin^2(pi T / 2)
    EpsteinEckart:  tanh^2(aT)
    """
    kind: ProfileKind
    n: float = 2.0
    a: float = 5.0

    def __post_init__(self):
        if not isinstance(self.kind, ProfileKind):
            object.__setattr__(self, "kind", ProfileKind(self.kind))
        if self.kind in (ProfileKind.POWER, ProfileKind.TANH_POWER):
            if not (math.isfinite(self.n) and self.n > 0):
                raise DomainError(f"멱 지수 n 은 양수여야 합니다: n={self.n}")
        if self.kind in (ProfileKind.TANH_POWER, ProfileKind.EPSTEIN_ECKART):
            if not (math.isfinite(self.a) and self.a > 0):
                raise DomainError(f"기울기 a 는 양수여야 합니다: a={self.a}")
        if self.kind in (ProfileKind.SIN2, ProfileKind.EPSTEIN_ECKART):
            # 영점 근처에서 이차로 사라짐
            object.__setattr__(self, "n", 2.0)

    @classmethod
    def power(cls, n: float) -> "FrequencyProfile":
        return cls(ProfileKind.POWER, n=n)

    @classmethod
    def tanh_power(cls, n: float, a: float = 5.0) -> "FrequencyProfile":
        return cls(ProfileKind.TANH_POWER, n=n, a=a)

    @classmethod
    def sin2(cls) -> "FrequencyProfile":
        return cls(ProfileKind.SIN2)

    @classmethod
    def epstein_eckart(cls, a: float) -> "FrequencyProfile":
        return cls(ProfileKind.EPSTEIN_ECKART, a=a)

    @classmethod
    def from_omega_tilde(cls, omega_tilde: float, G: float) -> "FrequencyProfile":
        """omega^2 = tanh^2(kappa t / 2), omega_tilde = omega_0 / kappa -> a = G / (2 omega_tilde)"""
        if omega_tilde <= 0:
            raise DomainError(f"omega_tilde 는 양수여야 합니다: {omega_tilde}")
        return cls.epstein_eckart(G / (2.0 * omega_tilde))

    @property
    def label(self) -> str:
        """CLI 문자열 형식의 정규 표현"""
        keys = sorted(PROFILE_KEYS[self.kind])
        if not keys:
            return self.kind.value
        params = ",".join(f"{key}={_number(getattr(self, key))}" for key in keys)
        return f"{self.kind.value}:{params}"


@dataclass(frozen=True)
class Crossing:
    """영점 통과 시각과 그 근처의 국소 멱 지수"""
    T: float
    local_index: float

    @property
    def nu(self) -> float:
        return 1.0 / (self.local_index + 2.0)


_SPEC_PATTERN = re.compile(r"^\s*([a-z0-9]+)\s*(?::(.*))?$")


def _number(value: float) -> str:
    """짧은 표기가 값을 보존하면 :g, 아니면 repr"""
    text = f"{value:g}"
    return text if float(text) == value else repr(float(value))


class ProfileService:
    """주파수 프로파일 평가 서비스"""

    def parse(self, spec: str) -> FrequencyProfile:
        """
        프로파일 문자열 파싱 (대소문자 무시)

        예: "power:n=2", "tanh:n=2,a=5", "sin2", "ee:a=15"

        Raises:
            DomainError: 알 수 없는 종류/키, 잘못된 값
        """
        match = _SPEC_PATTERN.match(spec.lower())
        if not match:
            raise DomainError(f"프로파일 형식이 올바르지 않습니다: {spec!r}")
        name, body = match.group(1), match.group(2)
        try:
            kind = ProfileKind(name)
        except ValueError:
            raise DomainError(f"알 수 없는 프로파일 종류입니다: {name!r}") from None

        params: dict[str, float] = {}
        for item in filter(None, (part.strip() for part in (body or "").split(","))):
            key, sep, raw = item.partition("=")
            key = key.strip()
            if not sep or key not in PROFILE_KEYS[kind]:
                raise DomainError(f"{kind.value} 프로파일에 허용되지 않는 키입니다: {item!r}")
            if key in params:
                raise DomainError(f"중복된 키입니다: {key!r}")
            try:
                params[key] = float(raw)
            except ValueError:
                raise DomainError(f"숫자가 아닌 값입니다: {item!r}") from None

        if kind == ProfileKind.POWER and "n" not in params:
            raise DomainError("power 프로파일에는 n 이 필요합니다")
        if kind == ProfileKind.TANH_POWER and "n" not in params:
            raise DomainError("tanh 프로파일에는 n 이 필요합니다")
        if kind == ProfileKind.EPSTEIN_ECKART and "a" not in params:
            raise DomainError("ee 프로파일에는 a 가 필요합니다")
        return FrequencyProfile(kind, **params)

    def f_value(self, profile: FrequencyProfile, T: float) -> float:
        """
        f(T) 값

        Raises:
            DomainError: 비유한 T, 또는 Power/TanhPower 에서 T < -1
        """
        self._check_time(profile, T)
        kind = profile.kind
        if kind == ProfileKind.POWER:
            return abs(T) ** profile.n
        if kind == ProfileKind.TANH_POWER:
            return (abs(math.tanh(profile.a * T)) / math.tanh(profile.a)) ** profile.n
        if kind == ProfileKind.SIN2:
            return math.sin(0.5 * math.pi * T) ** 2
        return math.tanh(profile.a * T) ** 2

    def f_derivative(self, profile: FrequencyProfile, T: float) -> float:
        """df/dT (영점에서 n < 1 이면 발산하므로 inf)"""
        self._check_time(profile, T)
        kind = profile.kind
        n, a = profile.n, profile.a
        if kind == ProfileKind.POWER:
            if T == 0.0:
                return 0.0 if n > 1 else (math.inf if n < 1 else 1.0)
            return n * abs(T) ** (n - 1) * math.copysign(1.0, T)
        if kind == ProfileKind.TANH_POWER:
            ratio = abs(math.tanh(a * T)) / math.tanh(a)
            if T == 0.0:
                return 0.0 if n > 1 else (math.inf if n < 1 else a / math.tanh(a))
            sech2 = 1.0 / math.cosh(a * T) ** 2
            return n * ratio ** (n - 1) * math.copysign(1.0, T) * a * sech2 / math.tanh(a)
        if kind == ProfileKind.SIN2:
            return 0.5 * math.pi * math.sin(math.pi * T)
        sech2 = 1.0 / math.cosh(a * T) ** 2
        return 2.0 * a * math.tanh(a * T) * sech2

    def omega(self, profile: FrequencyProfile, T: float) -> float:
        """omega(T) / omega_0 = sqrt(f)"""
        return math.sqrt(self.f_value(profile, T))

    def adiabaticity(self, profile: FrequencyProfile, G: float, T: float) -> float:
        """|d omega/dT| / (G omega^2), 영점에서 inf"""
        f = self.f_value(profile, T)
        if f == 0.0:
            return math.inf
        return abs(self.f_derivative(profile, T)) / (2.0 * G * f ** 1.5)

    def zero_crossings(self, profile: FrequencyProfile, T_max: float) -> list[Crossing]:
        """
        (-1, T_max] 구간의 영점 목록 (종류별 해석적 지식, 근 찾기 없음)

        Raises:
            DomainError: T_max <= -1
        """
        if not T_max > -1.0:
            raise DomainError(f"T_max 는 -1 보다 커야 합니다: {T_max}")
        if profile.kind == ProfileKind.SIN2:
            count = int(math.floor(T_max / 2.0)) + 1 if T_max >= 0 else 0
            return [Crossing(T=2.0 * k, local_index=2.0) for k in range(count)]
        if T_max >= 0.0:
            return [Crossing(T=0.0, local_index=profile.n)]
        return []

    def phase_integral(
        self,
        profile: FrequencyProfile,
        G: float,
        T_a: float,
        T_b: float,
        rel_tol: Optional[float] = None,
    ) -> float:
        """
        G * int_{T_a}^{T_b} sqrt(f(z)) dz

        영점에서 구간을 나눈 뒤 적응 Gauss-Kronrod 구적법을 적용한다.

        Raises:
            DomainError: T_a > T_b 또는 G <= 0
            NumericalFailure: 구적법 미수렴 (달성 오차 포함)
        """
        if G <= 0:
            raise DomainError(f"G 는 양수여야 합니다: {G}")
        if T_a > T_b:
            raise DomainError(f"T_a <= T_b 여야 합니다: T_a={T_a}, T_b={T_b}")
        if T_a == T_b:
            return 0.0
        self._check_time(profile, T_a)
        epsrel = rel_tol if rel_tol is not None else float(settings.ZEROCROSS["QUAD_REL_TOL"])

        cuts = [T_a, *self._zeros_between(profile, T_a, T_b), T_b]

        total = 0.0
        for low, high in zip(cuts[:-1], cuts[1:]):
            result = quad(
                lambda z: self.omega(profile, z),
                low,
                high,
                epsabs=1e-15,
                epsrel=epsrel,
                limit=QUAD_LIMIT,
                full_output=True,
            )
            if len(result) > 3:
                value, abserr, _info, message = result
                raise NumericalFailure(
                    f"위상 적분 미수렴 [{low:g}, {high:g}]: {message}",
                    T=high,
                    error_estimate=abserr,
                )
            total += result[0]
        return G * total

    def phase_closed_form(self, profile: FrequencyProfile, G: float, T_a: float, T_b: float) -> Optional[float]:
        """
        해석적으로 알려진 위상 적분 (교차 검증용), 없으면 None

        Power: 부호별 G * 2 |T|^{(n+2)/2} / (n+2)
        EpsteinEckart: (G/a) ln cosh(aT)
        Sin2: 아치 하나(길이 2)당 4G/pi
        """
        if profile.kind == ProfileKind.POWER:
            gamma = (profile.n + 2.0) / 2.0
            primitive = lambda T: math.copysign(abs(T) ** gamma / gamma, T)
            return G * (primitive(T_b) - primitive(T_a))
        if profile.kind == ProfileKind.EPSTEIN_ECKART:
            a = profile.a
            primitive = lambda T: _log_cosh(a * T) / a
            # tanh^2 의 제곱근은 |tanh| 이므로 영점에서 부호 처리
            if T_a < 0 < T_b:
                return G * (primitive(T_a) + primitive(T_b))
            return G * abs(primitive(T_b) - primitive(T_a))
        if profile.kind == ProfileKind.SIN2:
            primitive = lambda T: _sin2_primitive(T)
            return G * (primitive(T_b) - primitive(T_a))
        return None

    def phase_since_crossing(self, profile: FrequencyProfile, G: float, T: float) -> float:
        """
        T 직전 영점부터의 누적 위상 (첫 영점 이전이면 음수)
        """
        previous = 2.0 * math.floor(T / 2.0) if profile.kind == ProfileKind.SIN2 else 0.0
        if T >= 0.0:
            return self.phase_integral(profile, G, previous, T)
        return -self.phase_integral(profile, G, T, 0.0)

    def _zeros_between(self, profile: FrequencyProfile, T_a: float, T_b: float) -> list[float]:
        if profile.kind == ProfileKind.SIN2:
            first = math.ceil(T_a / 2.0)
            zeros = []
            k = first
            while 2.0 * k < T_b:
                if 2.0 * k > T_a:
                    zeros.append(2.0 * k)
                k += 1
            return zeros
        return [0.0] if T_a < 0.0 < T_b else []

    @staticmethod
    def _check_time(profile: FrequencyProfile, T: float) -> None:
        if not math.isfinite(T):
            raise DomainError(f"T 가 유한하지 않습니다: {T}")
        if profile.kind in (ProfileKind.POWER, ProfileKind.TANH_POWER) and T < -1.0:
            raise DomainError(f"{profile.kind.value} 프로파일은 T >= -1 에서만 정의됩니다: T={T}")


def _log_cosh(x: float) -> float:
    x = abs(x)
    return x + math.log1p(math.exp(-2.0 * x)) - math.log(2.0)


def _sin2_primitive(T: float) -> float:
    """int_0^T |sin(pi z/2)| dz"""
    arches = math.floor(T / 2.0)
    rest = T - 2.0 * arches
    return arches * 4.0 / math.pi + (2.0 / math.pi) * (1.0 - math.cos(0.5 * math.pi * rest))


profile_service = ProfileService()
