from rest_framework import serializers


class DistributionMomentsSerializer(serializers.Serializer):
    """확률표 모멘트"""
    mean_n = serializers.FloatField()
    variance_n = serializers.FloatField()
    mandel_q = serializers.FloatField()
    first_level_moment = serializers.FloatField()
    level_variance = serializers.FloatField()


class FockSummarySerializer(serializers.Serializer):
    """
    fock-dist 요약 JSON

    distribution 인스턴스와 moments, 닫힌 형태 mandel_q 를 함께 받는다.
    """
    N = serializers.IntegerField(source="distribution.N")
    levels = serializers.SerializerMethodField()
    total = serializers.FloatField(source="distribution.total")
    tail_mass = serializers.FloatField(source="distribution.tail_mass")
    moments = DistributionMomentsSerializer(allow_null=True)
    mandel_q_closed_form = serializers.FloatField(allow_null=True)
    mass_at_or_above_3N = serializers.SerializerMethodField()

    def get_levels(self, obj) -> int:
        return len(obj["distribution"].probs)

    def get_mass_at_or_above_3N(self, obj) -> float:
        distribution = obj["distribution"]
        return distribution.mass_at_or_above(3 * distribution.N)


class VarianceReportSerializer(serializers.Serializer):
    """세 경로 에너지 분산 비교 보고서"""
    N = serializers.IntegerField()
    closed_form = serializers.FloatField()
    operator_route = serializers.FloatField()
    distribution_route = serializers.FloatField()
    max_relative_gap = serializers.FloatField()
    consistent = serializers.BooleanField()
