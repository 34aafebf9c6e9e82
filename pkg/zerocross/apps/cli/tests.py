import csv
import json
import math
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings
from hypothesis import given, strategies as st
from rest_framework.exceptions import ValidationError

from apps.integrator.services import integrator_service
from apps.specfun.services import SpecialFunctionService

from .serializers import CheckResultSerializer, DoubleCrossConfigSerializer, FockDistConfigSerializer, RangeListField
from .services import (
    ArtifactService,
    ArtifactWriter,
    CheckResult,
    TableArtifact,
    VerificationService,
    config_hash,
    name_number,
)


def _read_csv(path: Path) -> tuple[str, list[list[str]]]:
    lines = path.read_text(encoding="utf-8").splitlines()
    return lines[0], list(csv.reader(lines[1:]))


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.output = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def run_command(self, name: str, **options) -> list[Path]:
        out = StringIO()
        options.setdefault("output", str(self.output))
        call_command(name, stdout=out, **options)
        return [Path(line) for line in out.getvalue().splitlines() if line]


class RangeListFieldTests(SimpleTestCase):

    def setUp(self):
        self.field = RangeListField()

    def test_comma_list(self):
        self.assertEqual(self.field.to_internal_value("1,2, 4"), [1.0, 2.0, 4.0])
        self.assertEqual(self.field.to_internal_value("-1"), [-1.0])

    def test_log_grid_default_density(self):
        values = self.field.to_internal_value("1:1000:log")
        self.assertEqual(len(values), 31)
        self.assertAlmostEqual(values[0], 1.0, places=12)
        self.assertAlmostEqual(values[10], 10.0, places=10)
        self.assertAlmostEqual(values[-1], 1000.0, places=9)

    def test_explicit_counts(self):
        self.assertEqual(len(self.field.to_internal_value("0.1:10:log,5")), 5)
        values = self.field.to_internal_value("-1:1:lin,201")
        self.assertEqual(len(values), 201)
        self.assertAlmostEqual(values[100], 0.0, places=14)

    def test_list_input(self):
        self.assertEqual(self.field.to_internal_value([1, "2.5"]), [1.0, 2.5])

    def test_rejects_malformed(self):
        for text in ("a,b", "1:2:cubic", "0:10:log", "1:10:lin,1", "1:2", "nan", ""):
            with self.assertRaises(ValidationError):
                self.field.to_internal_value(text)


class ConfigSerializerTests(SimpleTestCase):

    def test_fock_dist_needs_exactly_one_source(self):
        self.assertFalse(FockDistConfigSerializer(data={"N": 1}).is_valid())
        self.assertFalse(FockDistConfigSerializer(data={"N": 1, "u_minus": 1.0, "n": 2.0}).is_valid())
        serializer = FockDistConfigSerializer(data={"N": 1, "n": 2.0})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data["tail_bound"], settings.ZEROCROSS["TAIL_BOUND"])

    def test_fock_dist_tail_bound_range(self):
        self.assertFalse(FockDistConfigSerializer(data={"N": 1, "n": 2.0, "tail_bound": 1e-3}).is_valid())
        self.assertFalse(FockDistConfigSerializer(data={"N": 1, "n": 2.0, "tail_bound": 0.0}).is_valid())

    def test_double_cross_shared_exponent(self):
        serializer = DoubleCrossConfigSerializer(data={"n": 4.0, "n_second": 1.0})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data["n_first"], 4.0)
        self.assertEqual(serializer.validated_data["n_second"], 1.0)
        self.assertNotIn("n", serializer.validated_data)

    def test_canonical_drops_output_only_fields(self):
        serializer = DoubleCrossConfigSerializer(data={"output": "/tmp/a"})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertNotIn("output", serializer.canonical())
        self.assertEqual(serializer.canonical()["n_first"], 2.0)

    def test_non_finite_residual_is_null(self):
        data = CheckResultSerializer(CheckResult("wronskian", "fail", math.inf, 1e-8, "boom")).data
        self.assertIsNone(data["residual"])
        self.assertFalse(data["passed"])


class ArtifactWriterTests(SimpleTestCase):

    def test_config_hash_is_order_independent(self):
        first = config_hash({"b": 1, "a": [1.0, 2.0]})
        self.assertEqual(first, config_hash({"a": [1.0, 2.0], "b": 1}))
        self.assertEqual(len(first), 16)
        self.assertNotEqual(first, config_hash({"b": 2, "a": [1.0, 2.0]}))

    def test_csv_header_and_precision(self):
        with tempfile.TemporaryDirectory() as tmp:
            with ArtifactWriter(tmp, "rho-g", {"nu": [0.25]}) as writer:
                path = writer.write_table(TableArtifact("t", ("x", "y"), [(0.1, 1), (1.0 / 3.0, 2)]))
            header, rows = _read_csv(path)
        self.assertEqual(header, f"# zerocross {settings.ZEROCROSS['VERSION']} rho-g {config_hash({'nu': [0.25]})}")
        self.assertEqual(rows[0], ["x", "y"])
        self.assertEqual(rows[1], ["0.10000000000000001", "1"])
        self.assertEqual(float(rows[2][0]), 1.0 / 3.0)

    def test_partial_output_removed_on_failure(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(RuntimeError):
                with ArtifactWriter(tmp, "rho-g", {}) as writer:
                    writer.write_table(TableArtifact("partial", ("x",), [(1.0,)]))
                    raise RuntimeError("interrupted")
            self.assertEqual(list(Path(tmp).iterdir()), [])


class SweepPhaseCommandTests(CommandTestCase):

    def test_initial_time_is_unit_ratio(self):
        paths = self.run_command("sweep_phase", profile="power:n=2", G="1000", T="-1", K=8, jobs=1)
        self.assertEqual(len(paths), 1)
        header, rows = _read_csv(paths[0])
        self.assertTrue(header.startswith("# zerocross "))
        self.assertIn(" sweep-phase ", header)
        self.assertEqual(rows[0], ["phi", "R"])
        self.assertEqual(len(rows) - 1, 8)
        self.assertTrue(all(float(R) == 1.0 for _, R in rows[1:]))

    def test_one_file_per_time(self):
        paths = self.run_command("sweep_phase", profile="power:n=2", G="50", T="-1,0.5", K=8, jobs=1)
        self.assertEqual(len(paths), 2)

    def test_bad_profile_is_config_error(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command("sweep_phase", profile="nonsense:1", G="1000", T="1")
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertEqual(list(self.output.iterdir()), [])

    def test_small_K_is_config_error(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command("sweep_phase", profile="power:n=2", G="1000", T="1", K=4)
        self.assertEqual(ctx.exception.returncode, 2)


class AnalyticCommandTests(CommandTestCase):

    def test_rho_g_table(self):
        (path,) = self.run_command("rho_g", nu="0.25", g="1,100")
        _, rows = _read_csv(path)
        self.assertEqual(rows[0], ["nu", "g", "rho", "beta", "relative_gap"])
        self.assertEqual(len(rows), 3)
        self.assertAlmostEqual(float(rows[2][3]), 3.0, places=12)
        self.assertLess(abs(float(rows[2][4])), 0.01)

    def test_outputs_are_deterministic(self):
        first = self.run_command("rho_g", nu="0.25,0.2", g="0.5,5", output=str(self.output / "a"))
        second = self.run_command("rho_g", nu="0.25,0.2", g="0.5,5", output=str(self.output / "b"))
        self.assertEqual(first[0].read_bytes(), second[0].read_bytes())

    def test_energy_curve_starts_at_one(self):
        (path,) = self.run_command("energy_curve", nu="0.25", g="1", T="-1,0,1")
        _, rows = _read_csv(path)
        self.assertEqual(len(rows), 4)
        self.assertAlmostEqual(float(rows[1][3]), 1.0, delta=1e-10)

    def test_json_format(self):
        (path,) = self.run_command("rho_g", nu="0.25", g="1", format="json")
        self.assertEqual(path.suffix, ".json")
        payload = json.loads(path.read_text(encoding="utf-8"))
        self.assertEqual(payload["zerocross"]["subcommand"], "rho-g")
        self.assertEqual(payload["columns"], ["nu", "g", "rho", "beta", "relative_gap"])


class FockDistCommandTests(CommandTestCase):

    def test_table_and_summary(self):
        paths = self.run_command("fock_dist", N=2, u_minus=1.0)
        self.assertEqual(sorted(path.name for path in paths), ["fock_dist_N2.csv", "fock_dist_N2_summary.json"])
        _, rows = _read_csv(self.output / "fock_dist_N2.csv")
        self.assertEqual(rows[0], ["M", "p"])
        self.assertTrue(all(int(M) % 2 == 0 for M, _ in rows[1:]))

        summary = json.loads((self.output / "fock_dist_N2_summary.json").read_text(encoding="utf-8"))
        self.assertEqual(summary["N"], 2)
        self.assertAlmostEqual(summary["total"], 1.0, delta=1e-10)
        self.assertAlmostEqual(summary["beta"], 3.0, places=12)
        self.assertAlmostEqual(summary["moments"]["mandel_q"], summary["mandel_q_closed_form"], delta=1e-6)

    def test_term_limit_is_numerical_failure(self):
        with override_settings(ZEROCROSS={**settings.ZEROCROSS, "FOCK_MAX_TERMS": 5}):
            with self.assertRaises(CommandError) as ctx:
                self.run_command("fock_dist", N=0, u_minus=3.0)
        self.assertEqual(ctx.exception.returncode, 3)
        self.assertEqual(list(self.output.iterdir()), [])

    def test_conflicting_sources(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command("fock_dist", N=0, u_minus=1.0, n=2.0)
        self.assertEqual(ctx.exception.returncode, 2)


class DoubleCrossCommandTests(CommandTestCase):

    def test_extremes(self):
        self.run_command("double_cross", n=2.0)
        summary = json.loads((self.output / "double_cross_summary.json").read_text(encoding="utf-8"))
        self.assertAlmostEqual(summary["beta_min_closed_form"], 1.0, delta=1e-12)
        self.assertAlmostEqual(summary["beta_max_closed_form"], 17.0, delta=1e-12)
        self.assertAlmostEqual(summary["beta_min"], 1.0, delta=1e-6)
        self.assertAlmostEqual(summary["beta_max"], 17.0, delta=1e-6)
        _, rows = _read_csv(self.output / "double_cross_scan.csv")
        self.assertEqual(len(rows) - 1, 10_000)

    def test_plan_file(self):
        plan = self.output / "plan.json"
        plan.write_text(json.dumps({"crossings": [
            {"u_plus": [math.sqrt(2.0), 0.0], "u_minus": [1.0, 0.0]},
            {"u_plus": [math.sqrt(2.0), 0.0], "u_minus": [1.0, 0.0], "phi_before": 0.0},
        ]}), encoding="utf-8")
        self.run_command("double_cross", phi_scan=64, plan=str(plan))
        summary = json.loads((self.output / "double_cross_summary.json").read_text(encoding="utf-8"))
        self.assertEqual(summary["plan"]["crossings"], 2)
        self.assertAlmostEqual(summary["plan"]["beta_trace"][0], 3.0, places=12)
        self.assertAlmostEqual(summary["plan"]["beta_trace"][-1], 17.0, delta=1e-10)

    def test_missing_plan_is_config_error(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command("double_cross", plan=str(self.output / "missing.json"))
        self.assertEqual(ctx.exception.returncode, 2)


class SpecfunCheckCommandTests(CommandTestCase):

    def test_residuals_small(self):
        self.run_command("specfun_check", nu="0.25,0.4", x="0.5,5,8,40")
        _, rows = _read_csv(self.output / "specfun_check.csv")
        self.assertEqual(len(rows) - 1, 8)
        self.assertTrue(all(float(row[3]) < 1e-10 for row in rows[1:]))
        switchover = json.loads((self.output / "specfun_switchover.json").read_text(encoding="utf-8"))
        self.assertTrue(switchover["switchover"])


class VerifyCommandTests(CommandTestCase):

    def test_selected_checks_pass(self):
        checks = ["survival_probabilities", "composition_invariant", "energy_fluctuations"]
        self.run_command("verify", check=checks)
        report = json.loads((self.output / "verify_report.json").read_text(encoding="utf-8"))
        self.assertTrue(report["passed"])
        self.assertEqual([result["name"] for result in report["results"]], checks)
        self.assertTrue(all(result["level"] == "pass" for result in report["results"]))

    def test_failure_exit_code_keeps_report(self):
        failing = CheckResult("squeezing", "fail", 1.0, 1e-12, "forced")
        with mock.patch.object(VerificationService, "check_squeezing", return_value=failing):
            with self.assertRaises(CommandError) as ctx:
                self.run_command("verify", check=["squeezing"])
        self.assertEqual(ctx.exception.returncode, 1)
        report = json.loads((self.output / "verify_report.json").read_text(encoding="utf-8"))
        self.assertFalse(report["passed"])
        self.assertEqual(report["results"][0]["detail"], "forced")

    def test_unknown_check_is_config_error(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_command("verify", check=["no_such_check"])
        self.assertEqual(ctx.exception.returncode, 2)

    def test_misplaced_switchover_is_detected(self):
        # 멱급수를 x=40 까지 쓰면 상쇄 오차로 교차곱 항등식이 깨진다
        broken = VerificationService(SpecialFunctionService(series_max_x=40.0))
        self.assertEqual(broken.check_bessel_cross_product().level, "fail")
        self.assertEqual(VerificationService().check_bessel_cross_product().level, "pass")

    def test_wronskian_tiers(self):
        for residual, level in ((1e-9, "pass"), (5e-7, "warn"), (5e-6, "fail")):
            series = mock.Mock(max_wronskian_residual=residual)
            with mock.patch.object(integrator_service, "integrate_mode", return_value=series) as integrate:
                result = VerificationService().check_wronskian()
            self.assertEqual(result.level, level, msg=residual)
            self.assertEqual(result.residual, residual)
            self.assertFalse(integrate.call_args.kwargs["strict"])

    def test_loose_tolerance_lands_in_warning_tier(self):
        self.run_command("verify", check=["wronskian"], rel_tol=1e-6)
        report = json.loads((self.output / "verify_report.json").read_text(encoding="utf-8"))
        self.assertTrue(report["passed"])
        result = report["results"][0]
        self.assertEqual(result["level"], "warn")
        self.assertGreater(result["residual"], settings.ZEROCROSS["WRONSKIAN_TOL"])
        self.assertLessEqual(result["residual"], settings.ZEROCROSS["WRONSKIAN_HARD_TOL"])

    def test_default_tolerance_passes_wronskian(self):
        self.assertEqual(VerificationService().check_wronskian().level, "pass")


class ArtifactNameTests(SimpleTestCase):

    class _FixedRunner:
        def __init__(self, results):
            self.results = results

        def map_phase_points(self, payloads):
            return self.results

    def test_close_grid_points_get_distinct_files(self):
        curves = [{"T": T, "phi": [0.0], "R": [1.0]} for T in (0.1234561, 0.1234562)]
        results = [{"profile": "power:n=2", "G": G, "curves": curves} for G in (1000.0001, 1000.0002)]
        service = ArtifactService(self._FixedRunner(results))
        tables = service.sweep_phase({"profile": "power:n=2", "G": [1000.0001, 1000.0002], "T": [0.1234561, 0.1234562], "K": 8})
        names = [table.name for table in tables]
        self.assertEqual(len(set(names)), 4)
        self.assertIn("sweep_phase_power_n=2_G1000.0001_T0.1234561", names)

    @given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
    def test_name_number_keeps_twelve_digits(self, value):
        self.assertEqual(float(name_number(value)), float(format(value, ".12g")))
        if value != 0.0:
            self.assertLessEqual(abs(float(name_number(value)) - value), 1e-11 * abs(value))
