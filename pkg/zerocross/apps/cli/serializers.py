import math
from typing import Optional

import numpy as np
from django.conf import settings
from rest_framework import serializers

from apps.exceptions import DomainError
from apps.profiles.services import profile_service

# a:b:log 에서 개수를 생략했을 때 decade 당 점 수
LOG_POINTS_PER_DECADE = 10
LIN_DEFAULT_COUNT = 11


class RangeListField(serializers.Field):
    """
    실수 목록 플래그

    허용 형식:
        "1,2,4"          쉼표 목록
        "1:1000:log"     decade 당 10점 로그 격자 (양 끝 포함)
        "1:1000:log,31"  31점 로그 격자
        "-1:1:lin,201"   201점 선형 격자
    JSON 입력으로는 숫자 리스트도 받는다.
    """

    default_error_messages = {
        "invalid": "실수 목록 또는 a:b:log / a:b:lin,count 형식이어야 합니다.",
        "empty": "목록이 비어 있습니다.",
        "count": "격자 점 개수는 2 이상이어야 합니다.",
        "log_domain": "로그 격자의 양 끝은 양수여야 합니다.",
    }

    def to_internal_value(self, data):
        if isinstance(data, (list, tuple)):
            values = self._floats(data)
        elif isinstance(data, (int, float)):
            values = [float(data)]
        elif isinstance(data, str):
            values = self._parse(data.strip())
        else:
            self.fail("invalid")
        if not values:
            self.fail("empty")
        if not all(math.isfinite(v) for v in values):
            self.fail("invalid")
        return values

    def to_representation(self, value):
        return [float(v) for v in value]

    def _floats(self, items) -> list[float]:
        try:
            return [float(item) for item in items]
        except (TypeError, ValueError):
            self.fail("invalid")

    def _parse(self, text: str) -> list[float]:
        if ":" not in text:
            return self._floats(part for part in text.split(",") if part.strip())

        parts = text.split(":")
        if len(parts) != 3:
            self.fail("invalid")
        start, stop = self._floats(parts[:2])
        scale, _, count_text = parts[2].partition(",")
        scale = scale.strip().lower()
        if scale not in ("log", "lin"):
            self.fail("invalid")
        try:
            count = int(count_text) if count_text.strip() else None
        except ValueError:
            self.fail("invalid")

        if scale == "log":
            if start <= 0 or stop <= 0:
                self.fail("log_domain")
            if count is None:
                count = max(2, int(round(LOG_POINTS_PER_DECADE * abs(math.log10(stop / start)))) + 1)
            if count < 2:
                self.fail("count")
            return np.geomspace(start, stop, count).tolist()

        count = LIN_DEFAULT_COUNT if count is None else count
        if count < 2:
            self.fail("count")
        return np.linspace(start, stop, count).tolist()


class RunConfigSerializer(serializers.Serializer):
    """모든 하위 명령 공통 설정"""
    output = serializers.CharField(default="out")
    format = serializers.ChoiceField(choices=["csv", "json"], default="csv")

    # 결과에 영향을 주지 않아 설정 해시에서 제외
    NON_CANONICAL = ("output", "jobs")

    def canonical(self) -> dict:
        return {key: value for key, value in self.validated_data.items() if key not in self.NON_CANONICAL}


class IntegrationConfigMixin(serializers.Serializer):
    K = serializers.IntegerField(min_value=8, default=lambda: int(settings.ZEROCROSS["PHASE_SAMPLES"]))
    rel_tol = serializers.FloatField(required=False, allow_null=True, default=None)
    jobs = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)

    def validate_rel_tol(self, value):
        if value is not None and not 1e-13 <= value <= 1e-6:
            raise serializers.ValidationError("rel_tol 은 [1e-13, 1e-6] 범위여야 합니다.")
        return value


def _check_all(values, predicate, message):
    bad = [v for v in values if not predicate(v)]
    if bad:
        raise serializers.ValidationError(f"{message}: {bad[:5]}")
    return values


class SweepPhaseConfigSerializer(IntegrationConfigMixin, RunConfigSerializer):
    """sweep-phase 설정"""
    profile = serializers.CharField()
    G = RangeListField()
    T = RangeListField()
    strategy = serializers.ChoiceField(choices=["superposition", "direct"], default="superposition")

    def validate_profile(self, value):
        try:
            return profile_service.parse(value).label
        except DomainError as exc:
            raise serializers.ValidationError(str(exc)) from exc

    def validate_G(self, value):
        return _check_all(value, lambda G: G > 0, "G 는 양수여야 합니다")

    def validate_T(self, value):
        return _check_all(value, lambda T: T >= -1.0, "T 는 -1 이상이어야 합니다")


class MeanVsNConfigSerializer(IntegrationConfigMixin, RunConfigSerializer):
    """mean-vs-n 설정"""
    n = RangeListField()
    G = serializers.FloatField(default=1000.0, min_value=0.0)
    family = serializers.ChoiceField(choices=["power", "tanh"], default="power")
    a = serializers.FloatField(default=5.0, min_value=0.0)

    def validate_n(self, value):
        return _check_all(value, lambda n: 0 < n <= 10, "n 은 (0, 10] 범위여야 합니다")

    def validate(self, attrs):
        if attrs["G"] <= 0 or attrs["a"] <= 0:
            raise serializers.ValidationError("G 와 a 는 양수여야 합니다.")
        return attrs


class EnergyCurveConfigSerializer(RunConfigSerializer):
    """energy-curve 설정"""
    nu = RangeListField()
    g = RangeListField()
    T = RangeListField(default=[-1.0 + 0.01 * k for k in range(201)])

    def validate_nu(self, value):
        return _check_all(value, lambda nu: 0 < nu < 0.5, "nu 는 (0, 1/2) 범위여야 합니다")

    def validate_g(self, value):
        return _check_all(value, lambda g: 0 < g <= 1e5, "g 는 (0, 1e5] 범위여야 합니다")

    def validate_T(self, value):
        return _check_all(value, lambda T: -1.0 <= T <= 1.0, "T 는 [-1, 1] 범위여야 합니다")


class RhoGConfigSerializer(RunConfigSerializer):
    """rho-g 설정"""
    nu = RangeListField()
    g = RangeListField()

    validate_nu = EnergyCurveConfigSerializer.validate_nu
    validate_g = EnergyCurveConfigSerializer.validate_g


class FockDistConfigSerializer(RunConfigSerializer):
    """fock-dist 설정: u_minus 또는 단일 통과 멱 지수 n 중 하나"""
    N = serializers.IntegerField(min_value=0, max_value=10_000)
    u_minus = serializers.FloatField(required=False, allow_null=True, default=None, min_value=0.0)
    n = serializers.FloatField(required=False, allow_null=True, default=None)
    tail_bound = serializers.FloatField(max_value=1e-6, default=lambda: float(settings.ZEROCROSS["TAIL_BOUND"]))

    def validate(self, attrs):
        if (attrs["u_minus"] is None) == (attrs["n"] is None):
            raise serializers.ValidationError("--u-minus 와 --n 중 정확히 하나를 지정해야 합니다.")
        if attrs["n"] is not None and attrs["n"] <= 0:
            raise serializers.ValidationError({"n": "n 은 양수여야 합니다."})
        if attrs["tail_bound"] <= 0.0:
            raise serializers.ValidationError({"tail_bound": "tail_bound 는 양수여야 합니다."})
        return attrs


class DoubleCrossConfigSerializer(RunConfigSerializer):
    """
    double-cross 설정

    --n 은 두 통과에 같은 멱 지수를, --n-first/--n-second 는 각각을 지정한다.
    --plan 은 통과 계획 JSON 파일 경로.
    """
    n = serializers.FloatField(required=False, allow_null=True, default=None)
    n_first = serializers.FloatField(required=False, allow_null=True, default=None)
    n_second = serializers.FloatField(required=False, allow_null=True, default=None)
    phi_scan = serializers.IntegerField(min_value=8, default=10_000)
    plan = serializers.CharField(required=False, allow_null=True, default=None)

    def validate(self, attrs):
        n = attrs["n"] if attrs["n"] is not None else 2.0
        attrs["n_first"] = n if attrs["n_first"] is None else attrs["n_first"]
        attrs["n_second"] = n if attrs["n_second"] is None else attrs["n_second"]
        del attrs["n"]
        if attrs["n_first"] <= 0 or attrs["n_second"] <= 0:
            raise serializers.ValidationError("멱 지수는 양수여야 합니다.")
        return attrs


class SpecfunCheckConfigSerializer(RunConfigSerializer):
    """specfun-check 설정"""
    nu = RangeListField(default=[0.1, 0.25, 1.0 / 3.0, 0.4])
    x = RangeListField(default=np.geomspace(0.1, 60.0, 40).tolist())

    def validate_nu(self, value):
        return _check_all(value, lambda nu: 0 < nu < 1, "교차곱 검사의 nu 는 (0, 1) 범위여야 합니다")

    def validate_x(self, value):
        return _check_all(value, lambda x: x > 0, "x 는 양수여야 합니다")


class VerifyConfigSerializer(RunConfigSerializer):
    """verify 설정"""
    rel_tol = serializers.FloatField(required=False, allow_null=True, default=None)
    check = serializers.ListField(child=serializers.CharField(), required=False, default=list)

    def validate_check(self, value):
        from .services import VerificationService

        unknown = sorted(set(value) - set(VerificationService.CHECKS))
        if unknown:
            raise serializers.ValidationError(f"알 수 없는 검사입니다: {unknown}")
        return value

    validate_rel_tol = IntegrationConfigMixin.validate_rel_tol


class CheckResultSerializer(serializers.Serializer):
    """검증 항목 결과 (비유한 잔차는 null)"""
    name = serializers.CharField()
    level = serializers.CharField()
    passed = serializers.BooleanField()
    residual = serializers.SerializerMethodField()
    tolerance = serializers.FloatField()
    detail = serializers.CharField(allow_blank=True)

    def get_residual(self, obj) -> Optional[float]:
        return obj.residual if math.isfinite(obj.residual) else None


class VerificationReportSerializer(serializers.Serializer):
    passed = serializers.BooleanField()
    results = CheckResultSerializer(many=True)
