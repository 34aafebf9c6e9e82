"""
zerocross 하위 명령 공통 기반

종료 코드: 0 성공, 1 검증 실패, 2 잘못된 설정, 3 수치 실패
"""

import json
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from apps.exceptions import ConsistencyError, DomainError, NumericalFailure

from .services import ArtifactWriter

logger = logging.getLogger(__name__)

EXIT_VERIFY_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_NUMERICAL = 3

RANGE_HELP = "쉼표 목록 또는 a:b:log[,count] / a:b:lin,count"


class ZerocrossCommand(BaseCommand):
    """
    설정 검증 -> 계산 -> 산출물 기록

    하위 클래스는 subcommand, config_serializer 와 build(config) 를 정의한다.
    """

    subcommand = ""
    requires_system_checks: list = []
    config_serializer = None

    def add_arguments(self, parser):
        parser.add_argument("--output", help="산출물 디렉토리 (기본 out)")
        parser.add_argument("--format", choices=["csv", "json"], help="표 형식 (기본 csv)")

    def add_integration_arguments(self, parser):
        parser.add_argument("--K", type=int, help="위상 샘플 수 (8 이상)")
        parser.add_argument("--rel-tol", dest="rel_tol", type=float, help="적분 상대 허용 오차")
        parser.add_argument("--jobs", type=int, help="워커 수 (ZEROCROSS_JOBS 가 우선)")

    def validate(self, options: dict) -> tuple[dict, dict]:
        """
        Returns:
            (validated config, 해시용 정규 설정)
        """
        fields = self.config_serializer().fields
        data = {key: value for key, value in options.items() if key in fields and value is not None}
        serializer = self.config_serializer(data=data)
        if not serializer.is_valid():
            raise CommandError(
                f"잘못된 설정: {json.dumps(serializer.errors, ensure_ascii=False, default=str)}",
                returncode=EXIT_BAD_CONFIG,
            )
        return dict(serializer.validated_data), serializer.canonical()

    def build(self, config: dict) -> list:
        raise NotImplementedError

    def handle(self, *args, **options):
        config, canonical = self.validate(options)
        try:
            with ArtifactWriter(config["output"], self.subcommand, canonical, config["format"]) as writer:
                paths = writer.write(self.build(config))
        except DomainError as exc:
            raise CommandError(f"잘못된 설정: {exc}", returncode=EXIT_BAD_CONFIG) from exc
        except (NumericalFailure, ConsistencyError) as exc:
            logger.error("%s failed: %s", self.subcommand, exc)
            raise CommandError(f"수치 계산 실패: {exc}", returncode=EXIT_NUMERICAL) from exc
        self.report(paths)

    def report(self, paths: list[Path]) -> None:
        for path in paths:
            self.stdout.write(str(path))
