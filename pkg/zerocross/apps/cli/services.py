"""
CLI 하위 명령의 계산, 병렬 실행, 산출물 기록, 검증 스위트

각 하위 명령은 ArtifactService 에서 표(TableArtifact)와 문서(DocumentArtifact)를
만들고, ArtifactWriter 가 헤더 주석과 함께 CSV/JSON 으로 기록한다.
"""

import csv
import hashlib
import json
import logging
import math
import os
import re
from collections.abc import Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np
from django.conf import settings
from rest_framework.renderers import JSONRenderer

from apps.analytic.services import PowerSolutionParams, analytic_service
from apps.exceptions import ConsistencyError, DomainError, NumericalFailure
from apps.integrator.services import BogoliubovPair, evaluate_phase_point, integrator_service
from apps.profiles.services import FrequencyProfile, profile_service
from apps.quantum.serializers import FockSummarySerializer
from apps.quantum.services import MomentState, quantum_service
from apps.specfun.services import SpecialFunctionService, special_function_service
from apps.transitions.serializers import CrossingPlanSerializer
from apps.transitions.services import transition_service

logger = logging.getLogger(__name__)

_SLUG_PATTERN = re.compile(r"[^A-Za-z0-9.=+-]+")

# verify 의 Wronskian 구간 끝: power n=2, G=100 에서 약 2 rad
WRONSKIAN_CHECK_T_END = -0.98


@dataclass
class TableArtifact:
    """열 이름과 행으로 이루어진 표 (CSV 한 파일)"""
    name: str
    columns: tuple[str, ...]
    rows: list[tuple]


@dataclass
class DocumentArtifact:
    """JSON 문서 (요약, 보고서)"""
    name: str
    payload: dict


def config_hash(config: dict) -> str:
    """정규화된 설정 JSON 의 sha256 앞 16자리"""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def slug(text: str) -> str:
    return _SLUG_PATTERN.sub("_", text).strip("_")


def name_number(value: float) -> str:
    """파일 이름용 실수 표기, 12 유효숫자 (6자리에서 겹치는 격자점 구분)"""
    return format(float(value), ".12g")


def format_cell(value: Any) -> str:
    """실수는 17 유효숫자로 기록"""
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _sorted(data: Any) -> Any:
    if isinstance(data, Mapping):
        return {str(key): _sorted(data[key]) for key in sorted(data, key=str)}
    if isinstance(data, (list, tuple)):
        return [_sorted(item) for item in data]
    if isinstance(data, np.ndarray):
        return [_sorted(item) for item in data.tolist()]
    if isinstance(data, np.generic):
        return data.item()
    return data


def render_json(payload: Any) -> bytes:
    """키 정렬, 들여쓰기 2 의 결정적 JSON"""
    return JSONRenderer().render(_sorted(payload), renderer_context={"indent": 2}) + b"\n"


class ArtifactWriter:
    """
    산출물 기록기

    with 블록에서 예외가 나면 그때까지 기록한 파일을 모두 지운다.
    """

    def __init__(self, output_dir: str, subcommand: str, config: dict, fmt: str = "csv"):
        self.output_dir = Path(output_dir)
        self.subcommand = subcommand
        self.config_hash = config_hash(config)
        self.fmt = fmt
        self.written: list[Path] = []

    @property
    def header(self) -> str:
        version = settings.ZEROCROSS["VERSION"]
        return f"# zerocross {version} {self.subcommand} {self.config_hash}"

    @property
    def meta(self) -> dict:
        return {
            "version": settings.ZEROCROSS["VERSION"],
            "subcommand": self.subcommand,
            "config_hash": self.config_hash,
        }

    def __enter__(self) -> "ArtifactWriter":
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        if exc_type is not None:
            self.discard()
        return False

    def write(self, artifacts: Sequence[TableArtifact | DocumentArtifact]) -> list[Path]:
        paths = []
        for artifact in artifacts:
            if isinstance(artifact, TableArtifact):
                paths.append(self.write_table(artifact))
            else:
                paths.append(self.write_document(artifact))
        return paths

    def write_table(self, table: TableArtifact) -> Path:
        path = self.output_dir / f"{table.name}.{self.fmt}"
        self.written.append(path)
        if self.fmt == "json":
            payload = {"zerocross": self.meta, "columns": list(table.columns), "rows": [list(row) for row in table.rows]}
            path.write_bytes(render_json(payload))
        else:
            with path.open("w", newline="", encoding="utf-8") as handle:
                handle.write(self.header + "\n")
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(table.columns)
                for row in table.rows:
                    writer.writerow([format_cell(value) for value in row])
        logger.debug("wrote %s (%d rows)", path, len(table.rows))
        return path

    def write_document(self, document: DocumentArtifact) -> Path:
        path = self.output_dir / f"{document.name}.json"
        self.written.append(path)
        path.write_bytes(render_json({"zerocross": self.meta, **document.payload}))
        return path

    def discard(self) -> None:
        for path in self.written:
            path.unlink(missing_ok=True)
        if self.written:
            logger.warning("removed %d partial output files from %s", len(self.written), self.output_dir)
        self.written = []


def resolve_jobs(flag: Optional[int] = None) -> int:
    """ZEROCROSS_JOBS 가 --jobs 보다 우선, 둘 다 없으면 CPU 개수"""
    configured = int(settings.ZEROCROSS.get("JOBS") or 0)
    if configured > 0:
        return configured
    if flag:
        return int(flag)
    return os.cpu_count() or 1


class SweepRunner:
    """
    스윕 점 분배기

    local: ProcessPoolExecutor, celery: shared_task group. 결과는 항상 입력 순서.
    """

    def __init__(self, jobs: Optional[int] = None, backend: Optional[str] = None):
        self.jobs = resolve_jobs(jobs)
        self.backend = backend or settings.ZEROCROSS["SWEEP_BACKEND"]
        if self.backend not in ("local", "celery"):
            raise DomainError(f"알 수 없는 스윕 백엔드입니다: {self.backend!r}")

    def map_phase_points(self, payloads: list[dict]) -> list[dict]:
        logger.info("dispatching %d sweep points (backend=%s, jobs=%d)", len(payloads), self.backend, self.jobs)
        if self.backend == "celery":
            results = self._map_celery(payloads)
        elif self.jobs == 1 or len(payloads) <= 1:
            results = [evaluate_phase_point(payload) for payload in payloads]
        else:
            with ProcessPoolExecutor(max_workers=min(self.jobs, len(payloads))) as pool:
                results = list(pool.map(evaluate_phase_point, payloads))
        logger.info("collected %d sweep points", len(results))
        return results

    @staticmethod
    def _map_celery(payloads: list[dict]) -> list[dict]:
        from celery import group

        from apps.integrator.tasks import evaluate_phase_point_task

        job = group(evaluate_phase_point_task.s(payload) for payload in payloads)
        return job.apply_async().get()


# ----------------------------------------------------------------------
# 하위 명령 계산
# ----------------------------------------------------------------------


class ArtifactService:
    """하위 명령별 산출물 생성"""

    def __init__(self, runner: Optional[SweepRunner] = None):
        self._runner = runner

    def runner(self, jobs: Optional[int] = None) -> SweepRunner:
        return self._runner or SweepRunner(jobs)

    @staticmethod
    def _payload(profile: str, G: float, Ts: list[float], config: dict) -> dict:
        return {
            "profile": profile,
            "G": G,
            "T": Ts,
            "K": config["K"],
            "rel_tol": config.get("rel_tol"),
            "strategy": config.get("strategy", "superposition"),
        }

    def sweep_phase(self, config: dict) -> list[TableArtifact]:
        """(프로파일, G, T) 마다 phi, R 표"""
        payloads = [self._payload(config["profile"], G, config["T"], config) for G in config["G"]]
        results = self.runner(config.get("jobs")).map_phase_points(payloads)
        tables = []
        for result in results:
            for curve in result["curves"]:
                name = f"sweep_phase_{slug(result['profile'])}_G{name_number(result['G'])}_T{name_number(curve['T'])}"
                tables.append(TableArtifact(name, ("phi", "R"), list(zip(curve["phi"], curve["R"]))))
        return tables

    def mean_vs_n(self, config: dict) -> list[TableArtifact]:
        """위상 평균 R(1) 과 닫힌 형태 beta"""
        if config["family"] == "tanh":
            labels = [FrequencyProfile.tanh_power(n, config["a"]).label for n in config["n"]]
        else:
            labels = [FrequencyProfile.power(n).label for n in config["n"]]
        payloads = [self._payload(label, config["G"], [1.0], config) for label in labels]
        results = self.runner(config.get("jobs")).map_phase_points(payloads)
        rows = [
            (n, result["curves"][0]["mean"], analytic_service.beta_single(n))
            for n, result in zip(config["n"], results)
        ]
        name = f"mean_vs_n_{config['family']}_G{name_number(config['G'])}"
        return [TableArtifact(name, ("n", "mean_R", "beta_analytic"), rows)]

    @staticmethod
    def energy_curve(config: dict) -> list[TableArtifact]:
        """정확한 해로 계산한 R(T)"""
        rows = []
        for nu in config["nu"]:
            for g in config["g"]:
                params = PowerSolutionParams.from_nu_g(nu, g)
                for T in config["T"]:
                    rows.append((nu, g, T, analytic_service.energy_ratio_curve(params, T)))
        return [TableArtifact("energy_curve", ("nu", "g", "T", "R"), rows)]

    @staticmethod
    def rho_g(config: dict) -> list[TableArtifact]:
        """rho(g) 와 beta 의 상대 차이"""
        rows = []
        for nu in config["nu"]:
            beta = analytic_service.beta_single(1.0 / nu - 2.0)
            for g in config["g"]:
                rho = analytic_service.rho_of_g(nu, g)
                rows.append((nu, g, rho, beta, rho / beta - 1.0))
        return [TableArtifact("rho_g", ("nu", "g", "rho", "beta", "relative_gap"), rows)]

    @staticmethod
    def fock_pair(config: dict) -> BogoliubovPair:
        if config.get("n") is not None:
            return analytic_service.u_pair_single(config["n"])
        return BogoliubovPair.from_minus_magnitude(config["u_minus"])

    def fock_dist(self, config: dict) -> list[TableArtifact | DocumentArtifact]:
        """p(M) 표와 평균, 분산, Mandel Q 요약"""
        N = config["N"]
        pair = self.fock_pair(config)
        distribution = quantum_service.fock_distribution(N, pair, config["tail_bound"])
        defined = N > 0 or abs(pair.u_minus) > 0.0
        summary = FockSummarySerializer({
            "distribution": distribution,
            "moments": quantum_service.distribution_moments(distribution) if defined else None,
            "mandel_q_closed_form": quantum_service.mandel_q(N, pair) if defined else None,
        }).data
        summary["beta"] = pair.beta
        summary["variance"] = quantum_service.energy_variance_fock(N, pair).variance
        rows = list(distribution.probs.items())
        return [
            TableArtifact(f"fock_dist_N{N}", ("M", "p"), rows),
            DocumentArtifact(f"fock_dist_N{N}_summary", summary),
        ]

    @staticmethod
    def double_cross(config: dict) -> list[TableArtifact | DocumentArtifact]:
        """두 번 통과의 Phi 스캔, 또는 통과 계획 합성"""
        first = analytic_service.u_pair_single(config["n_first"])
        second = analytic_service.u_pair_single(config["n_second"])
        scan = transition_service.phi_scan(first, second, config["phi_scan"])
        beta_min, beta_max = transition_service.beta_extremes(first, second)
        artifacts: list[TableArtifact | DocumentArtifact] = [
            TableArtifact("double_cross_scan", ("Phi", "beta"), list(zip(scan.phis.tolist(), scan.betas.tolist()))),
        ]
        summary = {
            "n_first": config["n_first"],
            "n_second": config["n_second"],
            "beta_min": scan.beta_min,
            "beta_max": scan.beta_max,
            "phi_at_min": scan.phi_at_min,
            "phi_at_max": scan.phi_at_max,
            "beta_min_closed_form": beta_min,
            "beta_max_closed_form": beta_max,
        }
        if config.get("plan"):
            plan = load_plan(config["plan"])
            composed = transition_service.compose_plan(plan)
            summary["plan"] = {
                "crossings": len(plan),
                "u_plus": [composed.u_plus.real, composed.u_plus.imag],
                "u_minus": [composed.u_minus.real, composed.u_minus.imag],
                "beta_trace": transition_service.beta_trace(plan),
            }
        artifacts.append(DocumentArtifact("double_cross_summary", summary))
        return artifacts

    @staticmethod
    def specfun_check(
        config: dict,
        special_functions: Optional[SpecialFunctionService] = None,
    ) -> list[TableArtifact | DocumentArtifact]:
        """J_nu 값과 교차곱 항등식 잔차, 방법 전환 지점 잔차"""
        sf = special_functions or special_function_service
        rows = []
        for nu in config["nu"]:
            for x in config["x"]:
                rows.append((nu, x, sf.bessel_j(nu, x), cross_product_residual(sf, nu, x)))
        return [
            TableArtifact("specfun_check", ("nu", "x", "J_nu", "cross_product_residual"), rows),
            DocumentArtifact("specfun_switchover", {"switchover": sf.switchover_residuals()}),
        ]


def cross_product_residual(sf: SpecialFunctionService, nu: float, z: float) -> float:
    """|J_nu J_{1-nu} + J_{-nu} J_{nu-1} - 2 sin(nu pi)/(pi z)|"""
    lhs = sf.bessel_j(nu, z) * sf.bessel_j(1.0 - nu, z) + sf.bessel_j(-nu, z) * sf.bessel_j(nu - 1.0, z)
    return abs(lhs - 2.0 * math.sin(nu * math.pi) / (math.pi * z))


def load_plan(path: str):
    """
    통과 계획 JSON 파일 읽기

    Raises:
        DomainError: 파일이 없거나 형식이 잘못됨
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise DomainError(f"통과 계획 파일을 읽을 수 없습니다: {path} ({exc})") from exc
    serializer = CrossingPlanSerializer(data=data)
    if not serializer.is_valid():
        raise DomainError(f"통과 계획 형식 오류: {dict(serializer.errors)}")
    return serializer.to_plan()


# ----------------------------------------------------------------------
# 검증 스위트
# ----------------------------------------------------------------------


@dataclass
class CheckResult:
    """검증 항목 하나의 결과 (level: pass | warn | fail)"""
    name: str
    level: str
    residual: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.level != "fail"


@dataclass
class VerificationReport:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)


def _graded(name: str, residual: float, tolerance: float, detail: str = "") -> CheckResult:
    level = "pass" if residual <= tolerance else "fail"
    return CheckResult(name, level, float(residual), tolerance, detail)


class VerificationService:
    """
    오라클/불변량 검증 스위트

    special_functions 를 주입하면 그 인스턴스로 특수함수 검사를 수행한다.
    rel_tol 은 적분 검사에만 적용된다.
    """

    CHECKS = (
        "amplification_factors",
        "pre_crossing_invariant",
        "oracle_equivalence",
        "rho_convergence",
        "sudden_limit",
        "tanh_coefficient",
        "double_crossing",
        "survival_probabilities",
        "distribution_moments",
        "energy_fluctuations",
        "squeezing",
        "wronskian",
        "universal_invariant",
        "composition_invariant",
        "bessel_cross_product",
    )

    def __init__(
        self,
        special_functions: Optional[SpecialFunctionService] = None,
        rel_tol: Optional[float] = None,
    ):
        self.sf = special_functions or special_function_service
        self.rel_tol = rel_tol

    def run(self, names: Optional[Sequence[str]] = None) -> VerificationReport:
        report = VerificationReport()
        for name in names or self.CHECKS:
            check: Callable[[], CheckResult] = getattr(self, f"check_{name}")
            try:
                result = check()
            except (NumericalFailure, ConsistencyError, DomainError) as exc:
                result = CheckResult(name, "fail", math.inf, 0.0, f"{type(exc).__name__}: {exc}")
            log = logger.info if result.passed else logger.error
            log("verify %s: %s (residual %.3e, tolerance %.1e)", name, result.level, result.residual, result.tolerance)
            report.results.append(result)
        return report

    def _mean_R(self, profile: FrequencyProfile, G: float, T: float, K: int = 360) -> float:
        return integrator_service.phase_ensemble(profile, G, T, K, self.rel_tol).mean

    def check_amplification_factors(self) -> CheckResult:
        gaps = []
        for n in (1.0, 2.0, 4.0):
            beta = analytic_service.beta_single(n)
            gaps.append(abs(self._mean_R(FrequencyProfile.power(n), 1000.0, 1.0) / beta - 1.0))
        return _graded("amplification_factors", max(gaps), 0.02, "n=1,2,4 G=1000 K=360")

    def check_pre_crossing_invariant(self) -> CheckResult:
        worst = 0.0
        for n in (0.5, 2.0, 4.0):
            ensemble = integrator_service.phase_ensemble(FrequencyProfile.power(n), 1000.0, -0.5, 360, self.rel_tol)
            target = 0.5 ** (n / 2.0)
            worst = max(worst, float(np.max(np.abs(ensemble.R / target - 1.0))))
        return _graded("pre_crossing_invariant", worst, 0.01, "G=1000 T=-1/2")

    def check_oracle_equivalence(self) -> CheckResult:
        samples = np.linspace(-1.0, 1.0, 21)
        worst = 0.0
        for nu in (1.0 / 3.0, 0.25, 1.0 / 6.0):
            for g in (0.1, 1.0, 10.0):
                params = PowerSolutionParams.from_nu_g(nu, g)
                coefficients = analytic_service.bessel_coefficients(params)
                series = integrator_service.integrate_mode(
                    FrequencyProfile.power(params.n), params.G, 1.0,
                    rel_tol=self.rel_tol or 1e-12, samples=samples,
                )
                for state in series.states:
                    exact = analytic_service.epsilon_power(params, state.T, coefficients)
                    worst = max(worst, abs(state.eps - exact.eps) / abs(exact.eps))
        return _graded("oracle_equivalence", worst, 1e-6, "nu=1/3,1/4,1/6 g=0.1,1,10")

    def check_rho_convergence(self) -> CheckResult:
        worst = 0.0
        for nu in (1.0 / 3.0, 0.25, 1.0 / 6.0):
            beta = analytic_service.beta_single(1.0 / nu - 2.0)
            worst = max(worst, abs(analytic_service.rho_of_g(nu, 100.0) / beta - 1.0))
        return _graded("rho_convergence", worst, 0.01, "g=100")

    def check_sudden_limit(self) -> CheckResult:
        params = PowerSolutionParams.from_nu_g(0.25, 1e-3)
        jump = max(
            abs(analytic_service.energy_ratio_curve(params, T) - (1.0 + abs(T) ** params.n) / 2.0)
            for T in (-0.7, -0.3, 0.3, 0.7)
        )
        symmetry = max(
            abs(analytic_service.energy_ratio_curve(params, T) - analytic_service.energy_ratio_curve(params, -T))
            for T in (0.2, 0.35, 0.5)
        )
        residual = max(jump / 1e-3, symmetry / 1e-6)
        return _graded("sudden_limit", residual, 1.0, f"jump={jump:.2e} symmetry={symmetry:.2e}")

    def check_tanh_coefficient(self) -> CheckResult:
        omega_tilde, G = 4.0, 200.0
        profile = FrequencyProfile.from_omega_tilde(omega_tilde, G)
        series = integrator_service.integrate_mode(profile, G, 1.0, rel_tol=self.rel_tol or 1e-12, samples=[1.0])
        pair = integrator_service.extract_bogoliubov_at(series, 1.0)
        expected = abs(analytic_service.tanh_v_minus(omega_tilde))
        numeric_gap = abs(abs(pair.u_minus) / expected - 1.0)
        quarter_gap = abs(abs(analytic_service.tanh_v_minus(0.25)) ** 2 - 1.0 / math.sinh(math.pi / 2.0) ** 2)
        residual = max(numeric_gap / 0.005, quarter_gap / 1e-12)
        return _graded("tanh_coefficient", residual, 1.0, f"numeric gap {numeric_gap:.2e}")

    def check_double_crossing(self) -> CheckResult:
        pair = analytic_service.u_pair_single(2.0)
        scan = transition_service.phi_scan(pair, pair)
        extremes = max(abs(scan.beta_min - 1.0), abs(scan.beta_max - 17.0))

        after_one, after_two = [], []
        for G in (998.0, 999.0, 1000.0, 1001.0, 1002.0):
            first, second = integrator_service.phase_ensembles(FrequencyProfile.sin2(), G, [1.0, 3.0], 64, self.rel_tol)
            after_one.append(first.mean)
            after_two.append(second.mean)
        spread_one = (max(after_one) - min(after_one)) / min(after_one)
        spread_two = max(after_two) - min(after_two)
        residual = max(extremes / 1e-6, spread_one / 0.01, 1.0 / spread_two if spread_two > 0 else math.inf)
        detail = f"extremes gap {extremes:.2e}; one-crossing spread {spread_one:.2e}; two-crossing spread {spread_two:.3g}"
        return _graded("double_crossing", residual, 1.0, detail)

    def check_survival_probabilities(self) -> CheckResult:
        pair = BogoliubovPair.from_minus_magnitude(1.0)
        root = math.sqrt(2.0)
        expected = {0: 1 / root, 1: 1 / (2 * root), 2: 1 / (16 * root), 3: 1 / (32 * root)}
        worst = max(abs(quantum_service.fock_transition_prob(N, N, pair) - p) for N, p in expected.items())
        return _graded("survival_probabilities", worst, 1e-12)

    def check_distribution_moments(self) -> CheckResult:
        worst = 0.0
        for N in (0, 1, 5, 20, 50):
            for u_minus in (0.5, 1.0, 2.0):
                pair = BogoliubovPair.from_minus_magnitude(u_minus)
                distribution = quantum_service.fock_distribution(N, pair)
                moments = quantum_service.distribution_moments(distribution)
                first = pair.beta * (N + 0.5)
                variance = 2.0 * abs(pair.u_plus * pair.u_minus) ** 2 * (N * N + N + 1)
                worst = max(
                    worst,
                    abs(distribution.total - 1.0) / 1e-10,
                    abs(moments.first_level_moment / first - 1.0) / 1e-8,
                    abs(moments.level_variance / variance - 1.0) / 1e-7,
                )
        return _graded("distribution_moments", worst, 1.0, "N<=50, |u-|<=2")

    def check_energy_fluctuations(self) -> CheckResult:
        pair = BogoliubovPair.from_minus_magnitude(1.0)
        ratio_gap = abs(quantum_service.energy_variance_fock(0, pair).ratio_to_adiabatic - 16.0)
        mandel_gap = max(
            abs(quantum_service.mandel_q(N, pair) - (3 + N + 4 * N * N) / (3 * N + 1)) for N in range(4)
        )
        return _graded("energy_fluctuations", max(ratio_gap, mandel_gap), 1e-12)

    def check_squeezing(self) -> CheckResult:
        closed = abs(quantum_service.squeezing_after_crossing(1.0, 3.0) - math.tan(math.pi / 8.0) ** 2)
        moments = MomentState(2.0, 1.0, 2.0)
        params = quantum_service.squeezing_params(moments, 1.5)
        scan = abs(quantum_service.min_coordinate_variance_scan(moments, 1.5) - quantum_service.squeezing_invariant(params))
        squeezed = [N for N in range(6) if quantum_service.squeezing_after_crossing(2 * N + 1.0, 3.0) < 1.0]
        residual = max(closed / 1e-12, scan / 1e-8, 0.0 if squeezed == [0, 1, 2] else math.inf)
        return _graded("squeezing", residual, 1.0, f"squeezed Fock levels {squeezed}")

    def check_wronskian(self) -> CheckResult:
        """
        짧은 구간 (위상 약 2 rad) 의 Wronskian 드리프트를 등급으로 판정

        드리프트는 rel_tol 에 비례해 쌓이므로 기본 허용 오차에서는 pass,
        rel_tol=1e-6 에서는 warn 구간에 든다. 하드 한계 초과도 예외 없이 fail 로 기록.
        """
        config = settings.ZEROCROSS
        series = integrator_service.integrate_mode(
            FrequencyProfile.power(2.0), 100.0, WRONSKIAN_CHECK_T_END, rel_tol=self.rel_tol, strict=False,
        )
        residual = series.max_wronskian_residual
        level = "pass"
        if residual > float(config["WRONSKIAN_HARD_TOL"]):
            level = "fail"
        elif residual > float(config["WRONSKIAN_TOL"]):
            level = "warn"
        return CheckResult(
            "wronskian", level, residual, float(config["WRONSKIAN_TOL"]), f"power n=2 G=100 T<={WRONSKIAN_CHECK_T_END:g}",
        )

    def check_universal_invariant(self) -> CheckResult:
        initial = MomentState(2.0, 1.0, 2.0)
        params = PowerSolutionParams.from_nu_g(0.25, 10.0)
        worst = 0.0
        for T in np.linspace(-1.0, 1.0, 11):
            mode = analytic_service.epsilon_power(params, float(T))
            scale = max(1.0, abs(mode.eps) * abs(mode.deps))
            evolved = quantum_service.evolve_moments(initial, mode)
            worst = max(worst, abs(evolved.D - initial.D) / scale)
        return _graded("universal_invariant", worst, 1e-10)

    def check_composition_invariant(self) -> CheckResult:
        rng = np.random.default_rng(0)
        pair = analytic_service.u_pair_single(2.0)
        plan = transition_service.plan_from_pairs([pair] * 50, rng.uniform(0.0, 2.0 * math.pi, 49).tolist())
        composed = transition_service.compose_plan(plan)
        return _graded("composition_invariant", composed.invariant_residual / abs(composed.u_plus) ** 2, 1e-10)

    def check_bessel_cross_product(self) -> CheckResult:
        worst = 0.0
        for nu in (0.1, 0.25, 1.0 / 3.0, 0.4):
            for z in np.geomspace(0.1, 60.0, 40):
                worst = max(worst, cross_product_residual(self.sf, nu, float(z)))
        worst = max([worst] + [row["residual"] for row in self.sf.switchover_residuals()])
        return _graded("bessel_cross_product", worst, 1e-10)


artifact_service = ArtifactService()
