from apps.cli.base import RANGE_HELP, ZerocrossCommand
from apps.cli.serializers import RhoGConfigSerializer
from apps.cli.services import artifact_service


class Command(ZerocrossCommand):
    help = "통과 직후 평균 에너지 비 rho(g) 와 단열 극한 beta 의 수렴"
    subcommand = "rho-g"
    config_serializer = RhoGConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--nu", help=f"nu 목록 ({RANGE_HELP})")
        parser.add_argument("--g", help=f"g 목록 ({RANGE_HELP})")

    def build(self, config):
        return artifact_service.rho_g(config)
