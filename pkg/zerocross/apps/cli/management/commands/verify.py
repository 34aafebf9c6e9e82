from django.core.management.base import CommandError

from apps.cli.base import EXIT_VERIFY_FAILED, ZerocrossCommand
from apps.cli.serializers import VerifyConfigSerializer, VerificationReportSerializer
from apps.cli.services import DocumentArtifact, VerificationService


class Command(ZerocrossCommand):
    help = "오라클 비교와 불변량 검증 스위트 (실패 시 종료 코드 1)"
    subcommand = "verify"
    config_serializer = VerifyConfigSerializer

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--rel-tol", dest="rel_tol", type=float, help="적분 검사의 상대 허용 오차")
        parser.add_argument(
            "--check", action="append",
            help=f"실행할 검사 (반복 지정, 기본 전체): {', '.join(VerificationService.CHECKS)}",
        )

    def build(self, config):
        report = VerificationService(rel_tol=config["rel_tol"]).run(config["check"])
        self.report_passed = report.passed
        payload = VerificationReportSerializer(report).data
        return [DocumentArtifact("verify_report", payload)]

    def handle(self, *args, **options):
        self.report_passed = True
        super().handle(*args, **options)
        if not self.report_passed:
            raise CommandError("검증 실패: verify_report.json 참조", returncode=EXIT_VERIFY_FAILED)
