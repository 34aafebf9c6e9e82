"""
고전 궤적 X(T)와 복소 모드 함수 epsilon(t)의 수치 적분

단위: hbar = m = omega_0 = 1, t = G T. 모드 상태의 deps 는 d epsilon / dt.
"""

import bisect
import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from django.conf import settings
from scipy.integrate import solve_ivp

from apps.exceptions import DomainError, NumericalFailure
from apps.profiles.services import FrequencyProfile, profile_service

logger = logging.getLogger(__name__)

REL_TOL_RANGE = (1e-13, 1e-6)
DEFAULT_SAMPLES = 201
# solve_ivp 가 허용하는 rtol 하한 (100 * machine eps) 보다 약간 큼
MIN_REFERENCE_TOL = 2.5e-14


@dataclass(frozen=True)
class ClassicalState:
    """고전 궤적의 한 시점 (X, dX/dT)"""
    T: float
    X: float
    dXdT: float


@dataclass(frozen=True)
class ModeState:
    """모드 함수 (epsilon, d epsilon/dt) 의 한 시점"""
    T: float
    eps: complex
    deps: complex

    @property
    def wronskian_residual(self) -> float:
        """|eps' eps* - eps'* eps - 2i|"""
        return abs(self.deps * self.eps.conjugate() - self.deps.conjugate() * self.eps - 2j)


@dataclass(frozen=True)
class BogoliubovPair:
    """단열 전이 계수 (u+, u-), |u+|^2 - |u-|^2 = 1"""
    u_plus: complex
    u_minus: complex

    @classmethod
    def identity(cls) -> "BogoliubovPair":
        return cls(1.0 + 0j, 0j)

    @classmethod
    def from_minus_magnitude(cls, u_minus: float) -> "BogoliubovPair":
        """실수 u+ = sqrt(1 + |u-|^2) 를 갖는 쌍"""
        return cls(complex(math.sqrt(1.0 + u_minus * u_minus)), complex(u_minus))

    @property
    def invariant_residual(self) -> float:
        return abs(abs(self.u_plus) ** 2 - abs(self.u_minus) ** 2 - 1.0)

    @property
    def beta(self) -> float:
        return 1.0 + 2.0 * abs(self.u_minus) ** 2

    def validate(self, tolerance: float = 1e-8) -> "BogoliubovPair":
        if not (cmath.isfinite(self.u_plus) and cmath.isfinite(self.u_minus)):
            raise DomainError(f"Bogoliubov 계수가 유한하지 않습니다: {self}")
        if self.invariant_residual > tolerance:
            raise DomainError(
                f"|u+|^2 - |u-|^2 = 1 조건 위반 (잔차 {self.invariant_residual:.3e}): {self}"
            )
        return self


class PiecewiseSolution:
    """영점마다 재시작한 구간별 dense output 을 하나의 호출 객체로 묶음"""

    def __init__(self, breaks: Sequence[float], pieces: Sequence[Callable]):
        self.breaks = list(breaks)
        self.pieces = list(pieces)

    @property
    def t_min(self) -> float:
        return self.breaks[0]

    @property
    def t_max(self) -> float:
        return self.breaks[-1]

    def __call__(self, T: float) -> np.ndarray:
        index = bisect.bisect_right(self.breaks, T) - 1
        index = min(max(index, 0), len(self.pieces) - 1)
        return self.pieces[index](T)


@dataclass
class ClassicalSeries:
    profile: FrequencyProfile
    G: float
    phi0: float
    states: tuple[ClassicalState, ...]
    solution: PiecewiseSolution


@dataclass
class ModeSeries:
    """
    모드 함수 시계열

    mode_at 은 임의 시각의 ModeState 를, omega_sq 는 f(T) 를 돌려준다.
    수치 해가 아닌 정확한 해도 같은 형태로 표현할 수 있다.
    """
    G: float
    states: tuple[ModeState, ...]
    mode_at: Callable[[float], ModeState]
    omega_sq: Callable[[float], float]
    T_min: float
    T_max: float
    profile: Optional[FrequencyProfile] = None

    def eps_at(self, T: float) -> complex:
        return self.mode_at(T).eps

    @property
    def max_wronskian_residual(self) -> float:
        return max(state.wronskian_residual for state in self.states)


@dataclass
class PhaseEnsemble:
    """초기 위상 phi_k = 2 pi k / K 에 대한 에너지 비 R"""
    T: float
    phis: np.ndarray
    R: np.ndarray
    mean: float = field(init=False)
    min: float = field(init=False)
    max: float = field(init=False)

    def __post_init__(self):
        self.mean = float(np.mean(self.R))
        self.min = float(np.min(self.R))
        self.max = float(np.max(self.R))


class IntegratorService:
    """적응 DOP853 적분 서비스"""

    @staticmethod
    def _config() -> dict:
        return settings.ZEROCROSS

    def _tolerances(self, rel_tol: Optional[float]) -> tuple[float, float]:
        config = self._config()
        rtol = float(config["REL_TOL"]) if rel_tol is None else float(rel_tol)
        low, high = REL_TOL_RANGE
        if not low <= rtol <= high:
            raise DomainError(f"rel_tol 은 [{low:g}, {high:g}] 범위여야 합니다: {rtol}")
        atol = min(float(config["ABS_TOL"]), rtol * 1e-2)
        return rtol, atol

    @staticmethod
    def _check_window(G: float, T_end: float) -> None:
        if not (math.isfinite(G) and G > 0):
            raise DomainError(f"G 는 양수여야 합니다: {G}")
        if not (math.isfinite(T_end) and T_end > -1.0):
            raise DomainError(f"T_end 는 -1 보다 커야 합니다: {T_end}")

    def solve(
        self,
        profile: FrequencyProfile,
        G: float,
        y0: Sequence[float],
        T_end: float,
        rel_tol: Optional[float] = None,
    ) -> PiecewiseSolution:
        """
        y'' + G^2 f(T) y = 0 을 [-1, T_end] 에서 적분

        y0 는 (위치 성분들, dT 미분 성분들) 순서의 실수 벡터.
        영점마다 적분기를 재시작한다.

        Raises:
            NumericalFailure: 스텝 크기 언더플로 (발생 시각 포함)
        """
        self._check_window(G, T_end)
        rtol, atol = self._tolerances(rel_tol)
        half = len(y0) // 2
        g2 = G * G

        def rhs(T: float, y: np.ndarray) -> np.ndarray:
            dy = np.empty_like(y)
            dy[:half] = y[half:]
            dy[half:] = -g2 * profile_service.f_value(profile, T) * y[:half]
            return dy

        breaks = [-1.0]
        breaks.extend(c.T for c in profile_service.zero_crossings(profile, T_end) if -1.0 < c.T < T_end)
        breaks.append(T_end)

        pieces = []
        state = np.asarray(y0, dtype=float)
        for start, stop in zip(breaks[:-1], breaks[1:]):
            sol = solve_ivp(
                rhs, (start, stop), state,
                method="DOP853", rtol=rtol, atol=atol, dense_output=True,
            )
            if sol.status < 0:
                raise NumericalFailure(
                    f"적분 실패 ({profile.label}, G={G:g}): {sol.message}",
                    T=float(sol.t[-1]),
                )
            logger.debug(
                "segment %s G=%g [%g, %g]: %d steps, %d evaluations",
                profile.label, G, start, stop, len(sol.t) - 1, sol.nfev,
            )
            pieces.append(sol.sol)
            state = sol.y[:, -1]
        return PiecewiseSolution(breaks, pieces)

    def _sample_times(self, T_end: float, samples: Optional[Sequence[float]]) -> np.ndarray:
        if samples is None:
            return np.linspace(-1.0, T_end, DEFAULT_SAMPLES)
        times = np.asarray(samples, dtype=float)
        if times.size == 0 or times.min() < -1.0 or times.max() > T_end:
            raise DomainError(f"샘플 시각은 [-1, {T_end:g}] 범위여야 합니다")
        return times

    def integrate_classical(
        self,
        profile: FrequencyProfile,
        G: float,
        phi0: float,
        T_end: float,
        rel_tol: Optional[float] = None,
        samples: Optional[Sequence[float]] = None,
    ) -> ClassicalSeries:
        """
        X(-1) = cos(phi0), dX/dT(-1) = G sin(phi0) 에서 시작하는 고전 궤적

        Returns:
            샘플 시각에서의 ClassicalState 시계열
        """
        solution = self.solve(profile, G, [math.cos(phi0), G * math.sin(phi0)], T_end, rel_tol)
        states = []
        for T in self._sample_times(T_end, samples):
            X, dXdT = solution(float(T))
            states.append(ClassicalState(float(T), float(X), float(dXdT)))
        return ClassicalSeries(profile, G, phi0, tuple(states), solution)

    def energy_ratio(self, profile: FrequencyProfile, G: float, state: ClassicalState) -> float:
        """R = f(T) X^2 + G^-2 (dX/dT)^2"""
        return profile_service.f_value(profile, state.T) * state.X ** 2 + (state.dXdT / G) ** 2

    def basis_trajectories(
        self,
        profile: FrequencyProfile,
        G: float,
        T_end: float,
        rel_tol: Optional[float] = None,
    ) -> PiecewiseSolution:
        """
        phi=0, phi=pi/2 두 기저 궤적 (= Re epsilon, Im epsilon)

        반환 벡터: [X_c, X_s, dX_c/dT, dX_s/dT]
        """
        return self.solve(profile, G, [1.0, 0.0, 0.0, G], T_end, rel_tol)

    def integrate_mode(
        self,
        profile: FrequencyProfile,
        G: float,
        T_end: float,
        rel_tol: Optional[float] = None,
        samples: Optional[Sequence[float]] = None,
        strict: bool = True,
    ) -> ModeSeries:
        """
        epsilon(-1) = 1, d epsilon/dt(-1) = i 인 모드 함수

        strict=False 이면 Wronskian 잔차를 검사하지 않고 그대로 돌려준다
        (호출 측이 max_wronskian_residual 로 직접 판정).

        Raises:
            NumericalFailure: 스텝 언더플로, 또는 strict 에서 Wronskian 잔차가 하드 한계 초과
        """
        solution = self.basis_trajectories(profile, G, T_end, rel_tol)

        def mode_at(T: float) -> ModeState:
            y = solution(T)
            return ModeState(T, complex(y[0], y[1]), complex(y[2], y[3]) / G)

        states = [mode_at(float(T)) for T in self._sample_times(T_end, samples)]

        series = ModeSeries(
            G=G,
            states=tuple(states),
            mode_at=mode_at,
            omega_sq=lambda T: profile_service.f_value(profile, T),
            T_min=-1.0,
            T_max=T_end,
            profile=profile,
        )
        if strict:
            self.check_wronskian(series)
        return series

    def check_wronskian(self, series: ModeSeries) -> float:
        """
        Wronskian 잔차 검사: 경고 한계 초과 시 WARNING, 하드 한계 초과 시 실패

        Returns:
            최대 잔차
        """
        config = self._config()
        worst = max(series.states, key=lambda state: state.wronskian_residual)
        residual = worst.wronskian_residual
        if residual > float(config["WRONSKIAN_HARD_TOL"]):
            raise NumericalFailure(
                "Wronskian 드리프트가 하드 한계를 넘었습니다",
                T=worst.T,
                error_estimate=residual,
            )
        if residual > float(config["WRONSKIAN_TOL"]):
            logger.warning("Wronskian residual %.3e at T=%.6g exceeds %.1e", residual, worst.T, config["WRONSKIAN_TOL"])
        return residual

    def phase_ensembles(
        self,
        profile: FrequencyProfile,
        G: float,
        Ts: Sequence[float],
        K: Optional[int] = None,
        rel_tol: Optional[float] = None,
        strategy: str = "superposition",
    ) -> list[PhaseEnsemble]:
        """
        여러 시각의 위상 앙상블

        superposition: 두 기저 궤적의 선형 결합 (운동 방정식이 선형이므로 정확)
        direct: phi 마다 독립 적분

        Raises:
            DomainError: K < 8, 알 수 없는 전략
            NumericalFailure: 실패한 phi 포함
        """
        K = int(self._config()["PHASE_SAMPLES"]) if K is None else int(K)
        if K < 8:
            raise DomainError(f"위상 샘플 수 K 는 8 이상이어야 합니다: {K}")
        for T in Ts:
            if not (math.isfinite(T) and T >= -1.0):
                raise DomainError(f"T 는 -1 이상이어야 합니다: {T}")
        phis = 2.0 * math.pi * np.arange(K) / K

        if strategy == "superposition":
            return self._ensembles_by_superposition(profile, G, list(Ts), phis, rel_tol)
        if strategy == "direct":
            return self._ensembles_direct(profile, G, list(Ts), phis, rel_tol)
        raise DomainError(f"알 수 없는 위상 앙상블 전략입니다: {strategy!r}")

    def phase_ensemble(
        self,
        profile: FrequencyProfile,
        G: float,
        T: float,
        K: Optional[int] = None,
        rel_tol: Optional[float] = None,
        strategy: str = "superposition",
    ) -> PhaseEnsemble:
        return self.phase_ensembles(profile, G, [T], K, rel_tol, strategy)[0]

    def _ensembles_by_superposition(self, profile, G, Ts, phis, rel_tol) -> list[PhaseEnsemble]:
        T_end = max(Ts)
        solution = self.basis_trajectories(profile, G, T_end, rel_tol) if T_end > -1.0 else None
        cos_phi, sin_phi = np.cos(phis), np.sin(phis)
        ensembles = []
        for T in Ts:
            if T == -1.0 or solution is None:
                R = np.ones_like(phis)
            else:
                xc, xs, dxc, dxs = solution(T)
                X = cos_phi * xc + sin_phi * xs
                dX = cos_phi * dxc + sin_phi * dxs
                R = profile_service.f_value(profile, T) * X ** 2 + (dX / G) ** 2
            ensembles.append(PhaseEnsemble(T, phis, R))
        return ensembles

    def _ensembles_direct(self, profile, G, Ts, phis, rel_tol) -> list[PhaseEnsemble]:
        T_end = max(Ts)
        table = np.ones((len(Ts), len(phis)))
        if T_end > -1.0:
            for k, phi in enumerate(phis):
                try:
                    series = self.integrate_classical(profile, G, float(phi), T_end, rel_tol, samples=Ts)
                except NumericalFailure as exc:
                    raise NumericalFailure(
                        f"위상 앙상블 적분 실패: {exc.args[0]}",
                        T=exc.T,
                        phi=float(phi),
                        error_estimate=exc.error_estimate,
                    ) from exc
                for i, state in enumerate(series.states):
                    table[i, k] = self.energy_ratio(profile, G, state)
        return [PhaseEnsemble(T, phis, table[i]) for i, T in enumerate(Ts)]

    def extract_bogoliubov(self, mode: ModeState, omega: float, phi: float) -> BogoliubovPair:
        """
        epsilon = (u+ e^{i phi} + u- e^{-i phi}) / sqrt(omega) 의 역변환

        Raises:
            DomainError: omega <= 0
        """
        if not omega > 0.0:
            raise DomainError(f"순간 주파수는 양수여야 합니다: omega={omega}")
        root = math.sqrt(omega)
        u_plus = cmath.exp(-1j * phi) * (root * mode.eps - 1j * mode.deps / root) / 2.0
        u_minus = cmath.exp(1j * phi) * (root * mode.eps + 1j * mode.deps / root) / 2.0
        return BogoliubovPair(u_plus, u_minus)

    def extract_bogoliubov_at(self, series: ModeSeries, T: float) -> BogoliubovPair:
        """
        단열 구간 안의 시각 T 에서 Bogoliubov 쌍 추출

        Raises:
            DomainError: 프로파일이 없는 시계열, 또는 단열 창 밖의 T
        """
        if series.profile is None:
            raise DomainError("프로파일이 없는 시계열에서는 위상을 계산할 수 없습니다")
        profile, G = series.profile, series.G
        window = float(self._config()["ADIABATIC_WINDOW"])
        adiabaticity = profile_service.adiabaticity(profile, G, T)
        if adiabaticity > window:
            raise DomainError(
                f"T={T:g} 는 단열 창 밖입니다 (|d omega/dT|/(G omega^2) = {adiabaticity:.3e} > {window:g})"
            )
        phi = profile_service.phase_since_crossing(profile, G, T)
        return self.extract_bogoliubov(series.mode_at(T), profile_service.omega(profile, T), phi)

    def adiabatic_mode(self, profile: FrequencyProfile, G: float, T: float) -> ModeState:
        """
        영점 이전의 준고전 해 epsilon = omega^{-1/2} exp(i int omega dt)

        Raises:
            DomainError: 첫 영점 이후의 T
        """
        crossings = profile_service.zero_crossings(profile, T) if T > -1.0 else []
        if crossings or profile_service.f_value(profile, T) == 0.0:
            raise DomainError(f"T={T:g} 는 첫 영점 이전이 아닙니다")
        omega = profile_service.omega(profile, T)
        phase = profile_service.phase_integral(profile, G, -1.0, T) if T > -1.0 else 0.0
        rotation = cmath.exp(1j * phase)
        return ModeState(T, rotation / math.sqrt(omega), 1j * math.sqrt(omega) * rotation)

    def ermakov_residual(
        self,
        series: ModeSeries,
        T_from: Optional[float] = None,
        T_to: Optional[float] = None,
        step: Optional[float] = None,
    ) -> float:
        """
        max |rho'' + omega^2 rho - rho^-3|, rho = |epsilon|

        rho'' 는 dense output 위의 중심 차분 (t 단위 간격 step).
        """
        step_t = float(self._config()["ERMAKOV_STEP"]) if step is None else float(step)
        h = step_t / series.G
        low = series.T_min if T_from is None else T_from
        high = series.T_max if T_to is None else T_to

        worst = 0.0
        for state in series.states:
            T = state.T
            if T < low or T > high or T - h < series.T_min or T + h > series.T_max:
                continue
            rho = abs(series.eps_at(T))
            rho_plus = abs(series.eps_at(T + h))
            rho_minus = abs(series.eps_at(T - h))
            second = (rho_plus - 2.0 * rho + rho_minus) / (step_t * step_t)
            residual = abs(second + series.omega_sq(T) * rho - rho ** -3)
            worst = max(worst, residual)
        return worst

    def global_error_estimate(
        self,
        profile: FrequencyProfile,
        G: float,
        phi0: float,
        T_end: float,
        rel_tol: Optional[float] = None,
    ) -> float:
        """rel_tol 과 rel_tol/100 두 번 적분한 X 의 최대 상대 차이"""
        rtol, _ = self._tolerances(rel_tol)
        reference_tol = max(rtol / 100.0, MIN_REFERENCE_TOL)
        coarse = self.integrate_classical(profile, G, phi0, T_end, rtol)
        fine = self.integrate_classical(profile, G, phi0, T_end, reference_tol)
        scale = max(1.0, max(abs(s.X) for s in fine.states))
        return max(abs(a.X - b.X) for a, b in zip(coarse.states, fine.states)) / scale


def evaluate_phase_point(payload: dict) -> dict:
    """
    스윕 한 점 (프로파일, G, T 목록, K) 계산

    로컬 프로세스 풀과 Celery 작업이 같은 함수를 사용한다.
    """
    profile = profile_service.parse(payload["profile"])
    ensembles = integrator_service.phase_ensembles(
        profile,
        float(payload["G"]),
        [float(T) for T in payload["T"]],
        int(payload["K"]),
        payload.get("rel_tol"),
        payload.get("strategy", "superposition"),
    )
    return {
        "profile": profile.label,
        "G": float(payload["G"]),
        "curves": [
            {
                "T": ensemble.T,
                "phi": ensemble.phis.tolist(),
                "R": ensemble.R.tolist(),
                "mean": ensemble.mean,
                "min": ensemble.min,
                "max": ensemble.max,
            }
            for ensemble in ensembles
        ],
    }


integrator_service = IntegratorService()
