from apps.cli.base import RANGE_HELP, ZerocrossCommand
from apps.cli.serializers import SweepPhaseConfigSerializer
from apps.cli.services import artifact_service


class Command(ZerocrossCommand):
    help = "위상 phi 에 대한 에너지 비 R(T; phi) 스윕"
    subcommand = "sweep-phase"
    config_serializer = SweepPhaseConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--profile", help="power:n=N | tanh:n=N,a=A | sin2 | ee:a=A")
        parser.add_argument("--G", help=f"G 목록 ({RANGE_HELP})")
        parser.add_argument("--T", help=f"T 목록 ({RANGE_HELP})")
        parser.add_argument("--strategy", choices=["superposition", "direct"])
        self.add_integration_arguments(parser)

    def build(self, config):
        return artifact_service.sweep_phase(config)
