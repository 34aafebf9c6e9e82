from apps.cli.base import ZerocrossCommand
from apps.cli.serializers import DoubleCrossConfigSerializer
from apps.cli.services import artifact_service


class Command(ZerocrossCommand):
    help = "두 번 통과의 통과 간 위상 Phi 스캔과 통과 계획 합성"
    subcommand = "double-cross"
    config_serializer = DoubleCrossConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--n", type=float, help="두 통과 공통 멱 지수 (기본 2)")
        parser.add_argument("--n-first", dest="n_first", type=float)
        parser.add_argument("--n-second", dest="n_second", type=float)
        parser.add_argument("--phi-scan", dest="phi_scan", type=int, help="Phi 격자 점 수 (기본 10000)")
        parser.add_argument("--plan", help="통과 계획 JSON 파일")

    def build(self, config):
        return artifact_service.double_cross(config)
