"""End-to-end tests for the command line interface.

Every command is exercised through click's test runner against the built-in
default configuration, checking the JSON documents on stdout, the side files
written by ``--out``/``--csv``, and the documented exit codes:

* 0 — success, every requested bound holds;
* 1 — a verified bound failed or an internal invariant was violated;
* 2 — bad usage, bad configuration, or a resource budget was exceeded;
* 3 — interval arithmetic could not decide a comparison at the working
  precision.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction

import pytest
from click.testing import CliRunner

from adicweights import InvariantViolation, PrecisionError
from adicweights.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def _json(result):
    assert result.exit_code == 0, result.output + str(result.exception)
    return json.loads(result.stdout)


class TestTopLevel:
    def test_help(self, runner):
        result = runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        for name in ("profile", "solve-pair", "select", "build", "eval",
                     "verify", "far", "krantz", "run"):
            assert name in result.output

    def test_unknown_command_is_usage_error(self, runner):
        assert runner.invoke(main, ["no-such-command"]).exit_code == 2


class TestProfile:
    def test_profile_output(self, runner):
        doc = _json(runner.invoke(main, ["profile", "3", "2"]))
        assert doc["$type"] == "StabilizationProfile"
        assert (doc["m_pq"], doc["n0"], doc["c_pq"]) == (1, 1, 0)
        assert doc["pair"] == {"$type": "PrimePair", "p": 3, "q": 2}

    def test_rejects_composite(self, runner):
        assert runner.invoke(main, ["profile", "9", "2"]).exit_code == 2


class TestSolvePair:
    def test_known_solution(self, runner):
        doc = _json(runner.invoke(main, ["solve-pair", "3", "2", "1", "1"]))
        assert doc["$type"] == "PairSolution"
        assert (doc["m2"], doc["j"], doc["stride"]) == (1, 1, 1)

    def test_min_m2_advances(self, runner):
        doc = _json(
            runner.invoke(main, ["solve-pair", "3", "2", "1", "1",
                                 "--min-m2", "2"])
        )
        assert (doc["m2"], doc["j"]) == (2, 5)

    def test_inadmissible_k(self, runner):
        assert runner.invoke(main, ["solve-pair", "3", "2", "1", "2"]).exit_code == 2


class TestSelect:
    def test_default_family(self, runner):
        doc = _json(runner.invoke(main, ["select"]))
        assert doc["$type"] == "SelectionFamily"
        assert len(doc["blocks"]) == 1
        block = doc["blocks"][0]
        assert block["alpha"] == 2
        assert Fraction(block["epsilon"]) == Fraction(1, 256)
        assert Fraction(block["gap"]) <= Fraction(1, 256)

    def test_strict_mode_shrinks_epsilon(self, runner):
        doc = _json(runner.invoke(main, ["select", "--strict-paper"]))
        eps = Fraction(doc["blocks"][0]["epsilon"])
        assert eps < Fraction(1, 2**100)

    def test_missing_config_file(self, runner):
        result = runner.invoke(main, ["select", "--config", "/no/such/file.json"])
        assert result.exit_code == 2

    def test_invalid_config_file(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"q": 4}', encoding="utf-8")
        assert runner.invoke(main, ["select", "--config", str(bad)]).exit_code == 2


class TestBuild:
    def test_regions_and_csv(self, runner, tmp_path):
        csv_path = tmp_path / "regions.csv"
        doc = _json(runner.invoke(main, ["build", "--csv", str(csv_path)]))
        assert doc["weights"]["q"] == 2
        (block,) = doc["blocks"]
        total = sum(Fraction(r["mass"]) for r in block["regions"])
        assert total == Fraction(block["mass"])
        with open(csv_path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["block", "kind", "left", "right", "depth", "x", "y", "mass"]
        assert len(rows) - 1 == block["piece_count"]


class TestEval:
    def test_point_and_mass(self, runner):
        doc = _json(runner.invoke(
            main, ["eval", "1/2", "--measure", "0", "1"]))
        point = doc["points"][0]
        assert point["point"] == "1/2"
        assert Fraction(point["density"]) > 0
        assert Fraction(doc["masses"][0]["mass"]) == 1

    def test_requires_some_request(self, runner):
        assert runner.invoke(main, ["eval"]).exit_code == 2

    def test_bad_point(self, runner):
        assert runner.invoke(main, ["eval", "west"]).exit_code == 2


class TestVerify:
    def test_q_adic_passes(self, runner):
        doc = _json(runner.invoke(main, ["verify", "q-adic"]))
        assert doc["$type"] == "DoublingReport"
        assert doc["passed"] is True
        assert Fraction(doc["sup_ratio"]) <= Fraction(doc["theoretical_bound"])

    def test_p_adic_passes(self, runner):
        doc = _json(runner.invoke(main, ["verify", "p-adic"]))
        (entry,) = doc["scans"]
        assert entry["scan"]["passed"] is True
        assert entry["bound"]["$type"] == "ExhaustionBound"

    def test_p_adic_unknown_prime(self, runner):
        assert runner.invoke(main, ["verify", "p-adic", "--prime", "5"]).exit_code == 2

    def test_nondoubling_witnesses(self, runner):
        doc = _json(runner.invoke(main, ["verify", "nondoubling"]))
        (witness,) = doc["witnesses"]
        a, b = Fraction(3, 4), Fraction(5, 4)
        assert Fraction(witness["ratio"]) == (a / b) ** witness["alpha"]

    def test_rh_passes(self, runner):
        doc = _json(runner.invoke(main, ["verify", "rh"]))
        assert doc["passed"] is True and doc["exact"] is True

    def test_rh_fractional_exponent_uses_enclosures(self, runner):
        doc = _json(runner.invoke(main, ["verify", "rh", "--exponent", "5/2"]))
        assert doc["exact"] is False
        assert doc["passed"] is True

    def test_rh_inadmissible_exponent(self, runner):
        assert runner.invoke(main, ["verify", "rh", "--exponent", "4"]).exit_code == 2

    def test_ar_passes(self, runner):
        doc = _json(runner.invoke(main, ["verify", "ar"]))
        assert doc["passed"] is True

    def test_alpha_table(self, runner):
        doc = _json(runner.invoke(main, ["verify", "alpha-table", "--alphas", "2"]))
        (table,) = doc["tables"]
        assert table["rows"][0]["alpha"] == 2

    def test_alpha_table_bad_list(self, runner):
        result = runner.invoke(main, ["verify", "alpha-table", "--alphas", "x"])
        assert result.exit_code == 2


class TestFar:
    def test_constant_with_witnesses_and_csv(self, runner, tmp_path):
        csv_path = tmp_path / "far.csv"
        doc = _json(runner.invoke(
            main, ["far", "1/3", "2", "6",
                   "--witnesses", "3,1,1,2", "--csv", str(csv_path)]))
        assert Fraction(doc["result"]["inf_value"]) == Fraction(1, 3)
        assert doc["witnesses"] == [
            {"j": 1, "m": 2}, {"j": 5, "m": 4}, {"j": 21, "m": 6}]
        with open(csv_path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["exponent", "nearest_k", "scaled_distance"]
        assert len(rows) == 1 + 7  # header + exponents 0..6

    def test_rejects_base_one(self, runner):
        assert runner.invoke(main, ["far", "1/3", "1", "5"]).exit_code == 2

    def test_bad_witness_spec(self, runner):
        result = runner.invoke(
            main, ["far", "1/3", "2", "6", "--witnesses", "3,1,1"])
        assert result.exit_code == 2


class TestKrantz:
    def test_known_value(self, runner):
        doc = _json(runner.invoke(main, ["krantz", "5"]))
        assert Fraction(doc["C_m"]) == Fraction(1, 289)
        assert Fraction(doc["epsilon"]) == Fraction(1, 578)

    def test_rejects_zero(self, runner):
        assert runner.invoke(main, ["krantz", "0"]).exit_code == 2


class TestRun:
    def test_whole_pipeline(self, runner):
        doc = _json(runner.invoke(main, ["run"]))
        assert doc["$type"] == "RunReport"
        assert doc["verdict"] == "pass"

    def test_out_file_is_canonical(self, runner, tmp_path):
        out = tmp_path / "report.json"
        result = runner.invoke(main, ["krantz", "5", "--out", str(out)])
        assert result.exit_code == 0
        text = out.read_text(encoding="utf-8")
        assert text.endswith("\n")
        stdout_doc = _json(runner.invoke(main, ["krantz", "5"]))
        assert json.loads(text) == stdout_doc


class TestExitCodeMapping:
    def test_precision_error_exits_three(self, runner, monkeypatch):
        def boom(m):
            raise PrecisionError("cannot separate the bounds")

        monkeypatch.setattr("adicweights.cli.krantz_scan", boom)
        assert runner.invoke(main, ["krantz", "5"]).exit_code == 3

    def test_invariant_violation_exits_one(self, runner, monkeypatch):
        def boom(delta, n, m):
            raise InvariantViolation("claimed bound does not hold")

        monkeypatch.setattr("adicweights.cli.far_constant", boom)
        assert runner.invoke(main, ["far", "1/3", "2", "6"]).exit_code == 1
