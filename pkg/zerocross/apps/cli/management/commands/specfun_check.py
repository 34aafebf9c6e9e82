from apps.cli.base import RANGE_HELP, ZerocrossCommand
from apps.cli.serializers import SpecfunCheckConfigSerializer
from apps.cli.services import artifact_service


class Command(ZerocrossCommand):
    help = "Bessel J 값과 교차곱 항등식 잔차"
    subcommand = "specfun-check"
    config_serializer = SpecfunCheckConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--nu", help=f"차수 목록 ({RANGE_HELP})")
        parser.add_argument("--x", help=f"인자 목록 ({RANGE_HELP})")

    def build(self, config):
        return artifact_service.specfun_check(config)
