from apps.cli.base import RANGE_HELP, ZerocrossCommand
from apps.cli.serializers import EnergyCurveConfigSerializer
from apps.cli.services import artifact_service


class Command(ZerocrossCommand):
    help = "정확한 Bessel 해로 계산한 위상 평균 에너지 비 곡선"
    subcommand = "energy-curve"
    config_serializer = EnergyCurveConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--nu", help=f"nu 목록 ({RANGE_HELP})")
        parser.add_argument("--g", help=f"g 목록 ({RANGE_HELP})")
        parser.add_argument("--T", help="T 목록 (기본 -1:1:lin,201)")

    def build(self, config):
        return artifact_service.energy_curve(config)
