"""zerocross 공통 예외 계층"""

from typing import Optional


class ZerocrossError(Exception):
    """zerocross 예외의 기본 클래스"""


class DomainError(ZerocrossError, ValueError):
    """연산의 정의역을 벗어난 인자"""


class NumericalFailure(ZerocrossError, ArithmeticError):
    """
    수치 계산 실패 (적분 스텝 언더플로, 구적법 미수렴, Wronskian 드리프트 등)

    Attributes:
        T: 실패가 발생한 무차원 시간 (알 수 있는 경우)
        phi: 실패한 초기 위상 (위상 앙상블의 경우)
        error_estimate: 달성된 오차 추정치
    """

    def __init__(
        self,
        message: str,
        T: Optional[float] = None,
        phi: Optional[float] = None,
        error_estimate: Optional[float] = None,
    ):
        super().__init__(message)
        self.T = T
        self.phi = phi
        self.error_estimate = error_estimate

    def __str__(self) -> str:
        parts = [super().__str__()]
        if self.T is not None:
            parts.append(f"T={self.T:.17g}")
        if self.phi is not None:
            parts.append(f"phi={self.phi:.17g}")
        if self.error_estimate is not None:
            parts.append(f"error_estimate={self.error_estimate:.3e}")
        return " ".join(parts)


class ConsistencyError(ZerocrossError):
    """독립적인 두 계산 경로의 결과가 허용 오차를 넘어 불일치"""
