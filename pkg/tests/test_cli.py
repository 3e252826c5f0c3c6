"""Tests for the command line interface.

Everything goes through ``chiral_ldp.cli.main(argv)`` directly so the tests
see the same code path as the console script: CSV/JSON row schemas, the
17-digit float round trip, diagnostics on stderr, and the exit-code contract
(0 ok, 1 verification failure, 2 usage or guard, 3 numeric failure).
"""

from __future__ import annotations

import contextlib
import csv
import io
import json
import math

import pytest

import chiral_ldp.cli as cli_module
from chiral_ldp._quad import QuadratureError
from chiral_ldp.cli import main
from oracles import ks_critical

# Frozen reference values, computed once with mpmath (50 digits) and
# independent of the library code under test.
RATE_PINS = {
    ("max-right", "0", "1.5"): 0.18906978378367123604,
    ("max-right", "inf", "2"): 1.6137056388801093812,
    ("min-right", "0", "2"): 1.8068528194400546906,
}
CLOSED_TAIL_LOG_HALF = -0.50765194821075233095  # log P(2Y_1 >= 0.5) at n=1, v=0

RATE_HEADER = ["which", "alpha", "x", "value", "branch", "kappa", "warning", "schema_version"]
PROB_HEADER = ["n", "v", "x", "stat", "side", "log_probability", "probability", "schema_version"]
CONV_HEADER = [
    "theorem", "n", "v", "x", "l", "scaling", "exact", "predicted",
    "rate_target", "scaled_gap", "alt_rate_target", "alt_scaled_gap",
    "note", "schema_version",
]
CLT_HEADER = [
    "theorem", "n", "v", "y", "g_arg", "exact", "target", "abs_gap",
    "target_display", "abs_gap_display", "schema_version",
]
VERIFY_HEADER = ["name", "passed", "detail", "elapsed_ms", "schema_version"]


def run_cli(argv):
    """Invoke main() capturing (exit_code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def csv_rows(text):
    """Parse CSV output into (header, list of dict rows)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return header, [dict(zip(header, row)) for row in reader]


def load_schema():
    import importlib.resources as resources

    return json.loads(
        resources.files("chiral_ldp").joinpath("data/output_schema.json").read_text()
    )


class TestRateCommand:
    """CSV schema and pinned values for the rate subcommand."""

    def test_header_and_pinned_values(self):
        for (which, alpha, x), expected in RATE_PINS.items():
            code, out, err = run_cli(
                ["rate", "--which", which, "--alpha", alpha, "--x", x]
            )
            assert code == 0
            header, rows = csv_rows(out)
            assert header == RATE_HEADER
            assert len(rows) == 1
            assert float(rows[0]["value"]) == pytest.approx(expected, rel=1e-15)
            assert rows[0]["schema_version"] == "1"
            assert rows[0]["warning"] == ""

    def test_zero_region_row(self):
        # inside [0, 1] the right rate vanishes and kappa is not defined
        code, out, _ = run_cli(["rate", "--which", "max-right", "--alpha", "0", "--x", "1"])
        assert code == 0
        _, rows = csv_rows(out)
        assert float(rows[0]["value"]) == 0.0
        assert rows[0]["branch"] == "zero_region"
        assert rows[0]["kappa"] == ""

    def test_branch_labels(self):
        cases = {
            ("max-right", "0", "1.5"): "zero_alpha",
            ("max-right", "inf", "2"): "infinite_alpha",
            ("min-right", "0", "2"): "above_one",
            ("min-right", "0", "0.5"): "below_one",
        }
        for (which, alpha, x), branch in cases.items():
            _, out, _ = run_cli(["rate", "--which", which, "--alpha", alpha, "--x", x])
            _, rows = csv_rows(out)
            assert rows[0]["branch"] == branch

    def test_display_form_carries_warning(self):
        # the published infinite-alpha left form is not a true rate function;
        # the CLI must hand it over but flag it loudly
        code, out, err = run_cli(
            ["rate", "--which", "max-left", "--alpha", "inf", "--x", "0.5"]
        )
        assert code == 0
        _, rows = csv_rows(out)
        assert rows[0]["branch"] == "infinite_alpha_display"
        assert rows[0]["warning"] != ""
        assert float(rows[0]["value"]) < 0.0
        assert "# warning:" in err

    def test_diagnostics_go_to_stderr_prefixed(self):
        _, out, err = run_cli(["rate", "--which", "max-right", "--alpha", "0", "--x", "1.5"])
        assert "#" not in out
        for line in err.strip().split("\n"):
            assert line.startswith("# ")


class TestProbCommand:
    """Exact tail probabilities end to end through the CLI."""

    def test_closed_form_round_trip(self):
        code, out, err = run_cli(
            ["prob", "--n", "1", "--v", "0", "--x", "0.5", "--stat", "max", "--side", "ge"]
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == PROB_HEADER
        lp = float(rows[0]["log_probability"])
        assert lp == pytest.approx(CLOSED_TAIL_LOG_HALF, rel=1e-13)
        assert float(rows[0]["probability"]) == pytest.approx(math.exp(lp), rel=1e-15)
        assert "quadrature relative tolerance" in err

    def test_underflow_reports_zero_with_diagnostic(self):
        # P(max <= 0.2) at n=60 is around e^-1907: far below double range
        code, out, err = run_cli(
            ["prob", "--n", "60", "--v", "0", "--x", "0.2", "--stat", "max", "--side", "le"]
        )
        assert code == 0
        _, rows = csv_rows(out)
        lp = float(rows[0]["log_probability"])
        assert lp < -745.0
        assert float(rows[0]["probability"]) == 0.0
        assert "probability underflows" in err

    def test_quadrature_failure_exits_3_with_partial(self, monkeypatch):
        def boom(params, query, quad):
            raise QuadratureError("synthetic failure", partial=-1.0, rel_err=1e-3)

        monkeypatch.setattr(cli_module, "log_prob", boom)
        code, out, err = run_cli(
            ["prob", "--n", "5", "--v", "0", "--x", "0.9", "--stat", "max", "--side", "ge"]
        )
        assert code == 3
        _, rows = csv_rows(out)
        assert float(rows[0]["log_probability"]) == -1.0
        assert rows[0]["probability"] == ""
        assert "quadrature failure: synthetic failure" in err
        assert "partial estimate" in err


class TestExitCodes:
    """Usage and guard failures exit 2 with an error line on stderr."""

    @pytest.mark.parametrize(
        "argv, fragment",
        [
            (["rate", "--which", "max-right", "--alpha", "-1", "--x", "1.5"],
             "alpha must be >= 0"),
            (["prob", "--n", "1", "--x", "0.5", "--stat", "max", "--side", "ge",
              "--quad-tol", "1e-3"],
             "rel_tol must lie in (0, 1e-4]"),
            (["matrix", "--n", "100", "--count", "2"],
             "matrix probe is limited to n <= 64"),
            (["sample", "--n", "2", "--j", "0", "--count", "2"],
             "index j must lie in [1, n]"),
            (["converge", "--theorem", "t1-right", "--grid", "25:0", "--n", "25"],
             "pass either --grid or --n, not both"),
            (["converge", "--theorem", "t1-right", "--grid", "25-0"],
             "grid entries are n:v"),
        ],
    )
    def test_guard_failures(self, argv, fragment):
        code, out, err = run_cli(argv)
        assert code == 2
        assert fragment in err
        assert "error:" in err

    def test_argparse_rejects_unknown_choice(self):
        with pytest.raises(SystemExit) as exc_info:
            run_cli(["rate", "--which", "sideways", "--alpha", "0", "--x", "1.5"])
        assert exc_info.value.code == 2

    def test_verification_failure_exits_1(self, monkeypatch):
        import types

        fake = [types.SimpleNamespace(name="synthetic", passed=False,
                                      detail="forced", elapsed=0.0)]
        monkeypatch.setattr(cli_module, "run_checks", lambda quick: fake)
        code, out, err = run_cli(["verify", "--quick"])
        assert code == 1
        assert "FAILED: synthetic" in err
        assert "0/1 checks passed" in err


class TestJsonOutput:
    """--format json emits one record validating against the packaged schema."""

    @pytest.mark.parametrize(
        "argv, command",
        [
            (["rate", "--which", "max-right", "--alpha", "inf", "--x", "2"], "rate"),
            (["rate", "--which", "max-right", "--alpha", "0", "--x", "1"], "rate"),
            (["prob", "--n", "1", "--v", "0", "--x", "0.5", "--stat", "max",
              "--side", "ge"], "prob"),
            (["sample", "--n", "2", "--v", "1", "--j", "2", "--count", "3",
              "--seed", "3"], "sample"),
            (["matrix", "--n", "1", "--count", "2", "--seed", "4"], "matrix"),
            (["converge", "--theorem", "clt", "--grid", "500:0"], "converge"),
            (["verify", "--quick"], "verify"),
        ],
    )
    def test_records_validate(self, argv, command):
        jsonschema = pytest.importorskip("jsonschema")
        schema = load_schema()
        code, out, _ = run_cli(argv + ["--format", "json"])
        assert code == 0
        record = json.loads(out)
        jsonschema.validate(record, schema)
        assert record["schema_version"] == "1"
        assert record["command"] == command
        assert isinstance(record["results"], list) and record["results"]
        assert all(isinstance(d, str) for d in record["diagnostics"])

    def test_json_value_matches_pin(self):
        _, out, _ = run_cli(
            ["rate", "--which", "max-right", "--alpha", "inf", "--x", "2",
             "--format", "json"]
        )
        record = json.loads(out)
        assert record["results"][0]["value"] == pytest.approx(
            RATE_PINS[("max-right", "inf", "2")], rel=1e-15
        )
        assert record["results"][0]["branch"] == "infinite_alpha"


class TestSampleCommand:
    """Sampling subcommand: rows, summary statistics, KS mode."""

    def test_default_rows(self):
        code, out, _ = run_cli(
            ["sample", "--n", "2", "--v", "1", "--j", "2", "--count", "5", "--seed", "3"]
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["replicate", "y", "schema_version"]
        assert [int(r["replicate"]) for r in rows] == [0, 1, 2, 3, 4]
        assert all(float(r["y"]) > 0 for r in rows)

    def test_summary_mean_matches_known_expectation(self):
        # at j=1, v=0 the scaled draw 2nY_1 has mean pi/2
        code, out, err = run_cli(
            ["sample", "--n", "1", "--j", "1", "--count", "20000", "--summary"]
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["count", "mean_y", "mean_t", "sd_t", "se_t", "schema_version"]
        row = rows[0]
        assert int(row["count"]) == 20000
        gap = abs(float(row["mean_t"]) - math.pi / 2)
        assert gap <= 4.0 * float(row["se_t"])
        assert "t denotes 2nY_j" in err

    def test_ks_mode_below_critical_band(self):
        code, out, _ = run_cli(
            ["sample", "--n", "5", "--v", "2", "--j", "3", "--count", "8000",
             "--seed", "11", "--ks"]
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["count", "ks", "schema_version"]
        assert float(rows[0]["ks"]) < ks_critical(8000)

    def test_seeded_output_is_reproducible(self):
        argv = ["sample", "--n", "3", "--v", "2", "--j", "2", "--count", "10",
                "--seed", "77"]
        assert run_cli(argv)[1] == run_cli(argv)[1]


class TestMatrixCommand:
    """Matrix probe subcommand."""

    def test_n1_collapses_max_and_min(self):
        code, out, _ = run_cli(["matrix", "--n", "1", "--count", "3", "--seed", "4"])
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["replicate", "max", "min", "resample", "schema_version"]
        for row in rows:
            assert row["max"] == row["min"]
            assert row["resample"] == "false"

    def test_summary_keys(self):
        code, out, _ = run_cli(
            ["matrix", "--n", "2", "--v", "1", "--count", "40", "--seed", "6",
             "--summary"]
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["count", "mean_max", "mean_min", "resample_count",
                          "schema_version"]
        row = rows[0]
        assert int(row["count"]) == 40
        assert float(row["mean_max"]) >= float(row["mean_min"]) > 0


class TestConvergeCommand:
    """Convergence experiment subcommand."""

    def test_theorem_rows_and_shrinking_gap(self):
        code, out, _ = run_cli(["converge", "--theorem", "t1-right", "--n", "25,50"])
        assert code == 0
        header, rows = csv_rows(out)
        assert header == CONV_HEADER
        assert [int(r["n"]) for r in rows] == [25, 50]
        target = RATE_PINS[("max-right", "0", "1.5")]
        for row in rows:
            assert row["theorem"] == "t1-right"
            assert float(row["rate_target"]) == pytest.approx(target, rel=1e-15)
        gaps = [float(r["scaled_gap"]) for r in rows]
        assert gaps[1] < gaps[0]

    def test_clt_rows_and_ignored_x_diagnostic(self):
        code, out, err = run_cli(
            ["converge", "--theorem", "clt", "--grid", "500:0", "--x", "1.0"]
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == CLT_HEADER
        assert [float(r["g_arg"]) for r in rows] == pytest.approx([0.0, 2.0], abs=1e-12)
        for row in rows:
            assert 0.0 < float(row["exact"]) < 1.0
            assert float(row["abs_gap"]) < float(row["abs_gap_display"])
        assert "--x is ignored" in err


class TestVerifyCommand:
    """Self-check subcommand wraps the verification module."""

    def test_quick_suite_green(self):
        code, out, err = run_cli(["verify", "--quick"])
        assert code == 0
        header, rows = csv_rows(out)
        assert header == VERIFY_HEADER
        assert rows, "quick suite must contain checks"
        assert all(r["passed"] == "true" for r in rows)
        assert "checks passed (quick suite)" in err


class TestDeterminism:
    """Outputs are bit-identical across runs and thread settings."""

    def test_thread_count_does_not_change_output(self, monkeypatch):
        argv = ["prob", "--n", "30", "--v", "0", "--x", "1.2", "--stat", "max",
                "--side", "ge"]
        monkeypatch.setenv("CHIRAL_LDP_THREADS", "1")
        first = run_cli(argv)
        monkeypatch.setenv("CHIRAL_LDP_THREADS", "4")
        second = run_cli(argv)
        assert first[0] == second[0] == 0
        assert first[1] == second[1]

    def test_repeat_runs_identical(self):
        argv = ["rate", "--which", "max-left", "--alpha", "2.5", "--x", "0.7"]
        assert run_cli(argv)[1] == run_cli(argv)[1]
