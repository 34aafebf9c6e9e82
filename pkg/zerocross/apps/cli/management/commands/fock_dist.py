from apps.cli.base import ZerocrossCommand
from apps.cli.serializers import FockDistConfigSerializer
from apps.cli.services import artifact_service


class Command(ZerocrossCommand):
    help = "Fock 상태 |N> 의 통과 후 준위 분포 p(M)"
    subcommand = "fock-dist"
    config_serializer = FockDistConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--N", type=int, help="초기 준위")
        parser.add_argument("--u-minus", dest="u_minus", type=float, help="|u-| 직접 지정")
        parser.add_argument("--n", type=float, help="단일 통과 멱 지수로 |u-| 결정")
        parser.add_argument("--tail-bound", dest="tail_bound", type=float, help="절단 꼬리 질량 상한")

    def build(self, config):
        return artifact_service.fock_dist(config)
