from rest_framework import serializers

from apps.exceptions import DomainError
from apps.integrator.services import BogoliubovPair

from .services import CrossingPlan, PlannedCrossing


class ComplexField(serializers.ListField):
    """[re, im] 형식의 복소수"""

    child = serializers.FloatField(allow_null=False)

    def to_internal_value(self, data):
        values = super().to_internal_value(data)
        if len(values) != 2:
            raise serializers.ValidationError("복소수는 [re, im] 두 원소여야 합니다.")
        return complex(*values)

    def to_representation(self, value):
        return [float(value.real), float(value.imag)]


class BogoliubovPairSerializer(serializers.Serializer):
    """Bogoliubov 쌍"""
    u_plus = ComplexField()
    u_minus = ComplexField()

    def validate(self, attrs):
        try:
            BogoliubovPair(attrs["u_plus"], attrs["u_minus"]).validate()
        except DomainError as exc:
            raise serializers.ValidationError(str(exc)) from exc
        return attrs


class PlannedCrossingSerializer(BogoliubovPairSerializer):
    """통과 하나: 쌍과 직전 통과 이후의 위상"""
    phi_before = serializers.FloatField(default=0.0, min_value=0.0)


class CrossingPlanSerializer(serializers.Serializer):
    """
    통과 계획 JSON

    {"crossings": [{"u_plus": [re, im], "u_minus": [re, im], "phi_before": x}, ...]}
    """
    crossings = PlannedCrossingSerializer(many=True, allow_empty=True)

    def to_plan(self) -> CrossingPlan:
        """검증된 데이터를 CrossingPlan 으로 변환"""
        crossings = [
            PlannedCrossing(
                BogoliubovPair(item["u_plus"], item["u_minus"]),
                item["phi_before"],
            )
            for item in self.validated_data["crossings"]
        ]
        return CrossingPlan(tuple(crossings))

    @staticmethod
    def from_plan(plan: CrossingPlan) -> dict:
        return {
            "crossings": [
                {
                    "u_plus": [crossing.pair.u_plus.real, crossing.pair.u_plus.imag],
                    "u_minus": [crossing.pair.u_minus.real, crossing.pair.u_minus.imag],
                    "phi_before": crossing.phi_before,
                }
                for crossing in plan.crossings
            ]
        }
