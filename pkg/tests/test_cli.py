"""Command-line surface: formats, exit codes, determinism."""

import json

import numpy as np
import pytest

from splinegauss.cli import main

from tracing import golden, golden_rows


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRuleCommand:
    def test_uniform_quintic_matches_reference_table(self, capsys, tmp_path):
        out_file = tmp_path / "rule.json"
        code, _, _ = run(
            capsys, ["rule", "-d", "5", "-c", "1", "-N", "10", "-o", str(out_file)]
        )
        assert code == 0
        doc = json.loads(out_file.read_text())
        assert doc["schema_version"] == 1
        assert len(doc["nodes"]) == 21
        for i, _, tau, omega, _ in golden_rows("d5_c1_N10"):
            assert abs(doc["nodes"][i - 1] - tau) <= 1e-12
            assert abs(doc["weights"][i - 1] - omega) <= 1e-12
        assert doc["residual_norm"] <= 1e-13
        assert doc["trace"]["status"] == "converged"

    def test_deterministic_output(self, capsys):
        code1, out1, _ = run(capsys, ["rule", "-d", "5", "-c", "1", "-N", "4"])
        code2, out2, _ = run(capsys, ["rule", "-d", "5", "-c", "1", "-N", "4"])
        assert code1 == code2 == 0
        assert out1 == out2

    def test_csv_format(self, capsys):
        code, out, _ = run(
            capsys, ["rule", "-d", "5", "-c", "1", "-N", "4", "--format", "csv"]
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "element,i,tau,omega"
        assert len(lines) == 1 + 9
        assert len(lines[1].split(",")[2].split(".")[1]) == 20

    def test_parity_violation_exits_nonzero_with_json_error(self, capsys):
        code, _, err = run(capsys, ["rule", "-d", "5", "-c", "2", "-N", "2"])
        assert code == 2
        payload = json.loads(err)
        assert payload["error"] == "parity"
        assert "odd number of elements" in payload["message"]

    def test_knot_file_input(self, capsys, tmp_path):
        table = golden("d7_varying_N6")
        knots = tmp_path / "knots.json"
        knots.write_text(
            json.dumps(
                {
                    "degree": 7,
                    "breaks": table["breaks"],
                    "mults": table["mults"],
                }
            )
        )
        out_file = tmp_path / "rule.json"
        code, _, _ = run(
            capsys, ["rule", "--knots", str(knots), "-o", str(out_file)]
        )
        assert code == 0
        doc = json.loads(out_file.read_text())
        assert len(doc["nodes"]) == 19
        assert abs(doc["nodes"][0] - 0.01475556054370093982) <= 1e-11

    def test_env_var_tolerance_override(self, capsys, monkeypatch):
        monkeypatch.setenv("SPLINEGAUSS_TOL", "1e-30")
        code, _, err = run(capsys, ["rule", "-d", "5", "-c", "1", "-N", "4"])
        assert code == 4
        assert json.loads(err)["error"] == "residual"

    def test_missing_arguments(self, capsys):
        code, _, err = run(capsys, ["rule", "-d", "5"])
        assert code == 2
        assert json.loads(err)["error"] == "invalid-space"

    def test_custom_interval(self, capsys):
        code, out, _ = run(
            capsys,
            ["rule", "-d", "5", "-c", "1", "-N", "4", "--interval", "0", "1"],
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["interval"] == [0.0, 1.0]
        assert all(0.0 <= x <= 1.0 for x in doc["nodes"])


class TestValidateCommand:
    @pytest.fixture
    def rule_doc(self, capsys, tmp_path):
        path = tmp_path / "rule.json"
        code, _, _ = run(
            capsys, ["rule", "-d", "5", "-c", "0", "-N", "3", "-o", str(path)]
        )
        assert code == 0
        return path

    def test_good_document_passes(self, capsys, rule_doc):
        code, out, _ = run(capsys, ["validate", str(rule_doc)])
        assert code == 0
        report = json.loads(out)
        assert report["pass"] is True
        assert report["residual_norm"] <= 1e-13
        assert report["random_spline_max_error"] <= 1e-13
        assert report["samples"] == 100

    def test_perturbed_weight_fails_and_names_worst_basis(
        self, capsys, rule_doc, tmp_path
    ):
        doc = json.loads(rule_doc.read_text())
        doc["weights"][3] += 1e-6
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        code, out, _ = run(capsys, ["validate", str(bad)])
        assert code == 4
        report = json.loads(out)
        assert report["pass"] is False
        assert report["max_basis_error"] > 1e-8
        assert isinstance(report["worst_basis_index"], int)

    def test_validation_is_seeded_and_deterministic(self, capsys, rule_doc):
        _, out1, _ = run(capsys, ["validate", str(rule_doc)])
        _, out2, _ = run(capsys, ["validate", str(rule_doc)])
        assert out1 == out2


class TestAsymptoticCommand:
    def test_tabulated_pattern(self, capsys):
        code, out, _ = run(capsys, ["asymptotic", "-d", "7", "-c", "1"])
        assert code == 0
        doc = json.loads(out)
        assert doc["period"] == 1
        assert doc["provenance"] == "asymptotic"
        assert abs(doc["nodes"][1] - 0.31101776349538638639) <= 1e-15
        assert abs(doc["weights"][0] - 37 / 135) <= 1e-15

    def test_solver_route_matches(self, capsys):
        _, out1, _ = run(capsys, ["asymptotic", "-d", "5", "-c", "1"])
        _, out2, _ = run(capsys, ["asymptotic", "-d", "5", "-c", "1", "--solve"])
        a, b = json.loads(out1), json.loads(out2)
        assert np.allclose(a["nodes"], b["nodes"], atol=1e-13)
        assert np.allclose(a["weights"], b["weights"], atol=1e-13)

    def test_unsupported_pair(self, capsys):
        code, _, err = run(capsys, ["asymptotic", "-d", "5", "-c", "5"])
        assert code == 2
        assert json.loads(err)["error"] == "unsupported"


class TestHybridCommand:
    def test_shallow_c0_hybrid(self, capsys):
        code, out, _ = run(
            capsys,
            ["hybrid", "-d", "5", "-c", "0", "-N", "101", "--boundary-depth", "1"],
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["provenance"] == "hybrid"
        assert len(doc["nodes"]) == 253
        assert doc["residual_norm"] <= 1e-12

    def test_insufficient_depth_reports_residual(self, capsys):
        code, out, err = run(
            capsys,
            ["hybrid", "-d", "5", "-c", "2", "-N", "31", "--boundary-depth", "1"],
        )
        assert code == 4
        assert json.loads(err)["error"] == "residual"
        doc = json.loads(out)  # the rule is still emitted for inspection
        assert doc["residual_norm"] > 1e-12


class TestAssembleCommand:
    def test_savings_and_matrix_files(self, capsys, tmp_path):
        prefix = tmp_path / "demo"
        code, out, _ = run(
            capsys,
            [
                "assemble",
                "-p",
                "2",
                "-k",
                "1",
                "-l",
                "1",
                "-N",
                "11",
                "--out-prefix",
                str(prefix),
            ],
        )
        assert code == 0
        report = json.loads(out)
        assert report["mass_max_rel_diff"] <= 1e-12
        assert report["stiffness_max_rel_diff"] <= 1e-12
        assert report["optimal_nodes"] == 28
        assert report["classical_nodes"] == 33
        mass = np.array(
            [
                [float(v) for v in line.split(",")]
                for line in (tmp_path / "demo_mass.csv").read_text().splitlines()
            ]
        )
        assert mass.shape == (13, 13)  # trial dimension N(p-k) + k + 1
        assert np.abs(mass - mass.T).max() == 0.0
        assert (tmp_path / "demo_stiffness.csv").exists()
