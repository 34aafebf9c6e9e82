"""
여러 번의 영점 통과에 대한 Bogoliubov 쌍의 합성
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from apps.exceptions import DomainError
from apps.integrator.services import BogoliubovPair
from apps.quantum.services import MomentState

logger = logging.getLogger(__name__)

PAIR_TOLERANCE = 1e-8
DEFAULT_SCAN_SAMPLES = 10_000


@dataclass(frozen=True)
class PlannedCrossing:
    """한 번의 통과: 쌍과 직전 통과 이후 누적된 위상"""
    pair: BogoliubovPair
    phi_before: float = 0.0


@dataclass(frozen=True)
class CrossingPlan:
    """
    순서대로 겪는 영점 통과 목록

    첫 통과의 phi_before 는 사용하지 않는다.
    """
    crossings: tuple[PlannedCrossing, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "crossings", tuple(self.crossings))
        for index, crossing in enumerate(self.crossings):
            crossing.pair.validate(PAIR_TOLERANCE)
            if index > 0 and not (math.isfinite(crossing.phi_before) and crossing.phi_before >= 0.0):
                raise DomainError(f"{index}번째 통과의 phi_before 는 0 이상이어야 합니다: {crossing.phi_before}")

    def __len__(self) -> int:
        return len(self.crossings)


@dataclass(frozen=True)
class PhaseScan:
    """Phi 격자 위의 beta 와 세밀화한 극값"""
    phis: np.ndarray
    betas: np.ndarray
    beta_min: float
    beta_max: float
    phi_at_min: float
    phi_at_max: float


class TransitionService:
    """Bogoliubov 쌍 대수"""

    @staticmethod
    def identity_pair() -> BogoliubovPair:
        return BogoliubovPair.identity()

    def compose_two(self, u: BogoliubovPair, w: BogoliubovPair, Phi: float) -> BogoliubovPair:
        """
        u 다음에 위상 Phi 만큼 지나 w 를 겪는 합성

        U+ = w+ u+ e^{i Phi} + w-* u- e^{-i Phi}
        U- = w- u+ e^{i Phi} + w+* u- e^{-i Phi}
        """
        forward = cmath.exp(1j * Phi)
        backward = forward.conjugate()
        U_plus = w.u_plus * u.u_plus * forward + w.u_minus.conjugate() * u.u_minus * backward
        U_minus = w.u_minus * u.u_plus * forward + w.u_plus.conjugate() * u.u_minus * backward
        return BogoliubovPair(U_plus, U_minus)

    @staticmethod
    def beta_of(pair: BogoliubovPair) -> float:
        """beta = 1 + 2|u-|^2"""
        return pair.beta

    @staticmethod
    def beta_two(u: BogoliubovPair, w: BogoliubovPair, Phi: float) -> float:
        """두 번 통과한 뒤의 beta 닫힌 형태"""
        interference = w.u_plus * w.u_minus * u.u_plus * u.u_minus.conjugate() * cmath.exp(2j * Phi)
        return 1.0 + 2.0 * (
            abs(w.u_minus) ** 2 * abs(u.u_plus) ** 2
            + abs(w.u_plus) ** 2 * abs(u.u_minus) ** 2
            + 2.0 * interference.real
        )

    @staticmethod
    def beta_extremes(u: BogoliubovPair, w: BogoliubovPair) -> tuple[float, float]:
        """Phi 에 대한 beta 의 최소, 최대"""
        a = abs(w.u_plus * u.u_minus)
        b = abs(w.u_minus * u.u_plus)
        return 1.0 + 2.0 * (a - b) ** 2, 1.0 + 2.0 * (a + b) ** 2

    def phi_scan(
        self,
        u: BogoliubovPair,
        w: BogoliubovPair,
        samples: int = DEFAULT_SCAN_SAMPLES,
    ) -> PhaseScan:
        """
        Phi in [0, 2 pi) 균등 격자 위의 beta 와 Brent 세밀화한 극값

        Raises:
            DomainError: samples < 8
        """
        if samples < 8:
            raise DomainError(f"Phi 샘플 수는 8 이상이어야 합니다: {samples}")
        phis = 2.0 * math.pi * np.arange(samples) / samples
        base = (
            abs(w.u_minus) ** 2 * abs(u.u_plus) ** 2
            + abs(w.u_plus) ** 2 * abs(u.u_minus) ** 2
        )
        interference = w.u_plus * w.u_minus * u.u_plus * u.u_minus.conjugate()
        betas = 1.0 + 2.0 * (base + 2.0 * np.real(interference * np.exp(2j * phis)))

        step = phis[1] - phis[0]
        phi_min = self._refine(lambda x: self.beta_two(u, w, x), float(phis[np.argmin(betas)]), step)
        phi_max = self._refine(lambda x: -self.beta_two(u, w, x), float(phis[np.argmax(betas)]), step)
        return PhaseScan(
            phis=phis,
            betas=betas,
            beta_min=min(float(np.min(betas)), self.beta_two(u, w, phi_min)),
            beta_max=max(float(np.max(betas)), self.beta_two(u, w, phi_max)),
            phi_at_min=phi_min,
            phi_at_max=phi_max,
        )

    @staticmethod
    def _refine(objective, center: float, step: float) -> float:
        result = minimize_scalar(
            objective,
            bounds=(center - step, center + step),
            method="bounded",
            options={"xatol": 1e-12},
        )
        return float(result.x)

    def compose_plan(self, plan: CrossingPlan) -> BogoliubovPair:
        """왼쪽 접기로 전체 통과를 합성 (빈 계획은 항등 쌍)"""
        if not plan.crossings:
            return self.identity_pair()
        result = plan.crossings[0].pair
        for crossing in plan.crossings[1:]:
            result = self.compose_two(result, crossing.pair, crossing.phi_before)
        logger.debug("composed %d crossings: beta=%.6g", len(plan), result.beta)
        return result

    def beta_trace(self, plan: CrossingPlan) -> list[float]:
        """각 통과 직후의 beta"""
        trace = []
        result = self.identity_pair()
        for index, crossing in enumerate(plan.crossings):
            result = crossing.pair if index == 0 else self.compose_two(result, crossing.pair, crossing.phi_before)
            trace.append(result.beta)
        return trace

    def plan_from_pairs(self, pairs: Sequence[BogoliubovPair], phases: Sequence[float]) -> CrossingPlan:
        """pairs[k] 앞에 phases[k-1] 위상을 두는 계획"""
        if len(phases) != max(len(pairs) - 1, 0):
            raise DomainError("위상 개수는 통과 횟수보다 하나 적어야 합니다")
        crossings = [PlannedCrossing(pair, 0.0 if k == 0 else phases[k - 1]) for k, pair in enumerate(pairs)]
        return CrossingPlan(tuple(crossings))

    def beta_general(self, pair: BogoliubovPair, moments: MomentState, omega0: float = 1.0) -> float:
        """
        임의 초기 상태의 에너지 증폭 beta + delta_beta

        delta_beta = [(w0^2 <x^2> - <p^2>) Re(u+u-) + w0 <xp+px> Im(u+u-)] / E0

        Raises:
            DomainError: 평균 에너지가 0 이하
        """
        energy = 0.5 * (moments.pp + omega0 ** 2 * moments.xx)
        if not energy > 0.0:
            raise DomainError(f"초기 평균 에너지가 양수가 아닙니다: {energy}")
        product = pair.u_plus * pair.u_minus
        delta = (
            (omega0 ** 2 * moments.xx - moments.pp) * product.real
            + omega0 * moments.xp_sym * product.imag
        ) / energy
        return pair.beta + delta


transition_service = TransitionService()
