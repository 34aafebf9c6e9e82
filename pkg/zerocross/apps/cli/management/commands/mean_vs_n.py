from apps.cli.base import RANGE_HELP, ZerocrossCommand
from apps.cli.serializers import MeanVsNConfigSerializer
from apps.cli.services import artifact_service


class Command(ZerocrossCommand):
    help = "한 번 통과 후 위상 평균 에너지 비와 닫힌 형태 beta(n) 비교"
    subcommand = "mean-vs-n"
    config_serializer = MeanVsNConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--n", help=f"멱 지수 목록 ({RANGE_HELP})")
        parser.add_argument("--G", type=float, help="단열 매개변수 (기본 1000)")
        parser.add_argument("--family", choices=["power", "tanh"])
        parser.add_argument("--a", type=float, help="tanh 계열의 폭 매개변수 (기본 5)")
        self.add_integration_arguments(parser)

    def build(self, config):
        return artifact_service.mean_vs_n(config)
