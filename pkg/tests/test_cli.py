"""Command-line interface: subcommands, report schema, determinism."""

import json
import math

import pytest

from semibif.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAnalyze:
    def test_logarithmic_problem(self, capsys, tmp_path):
        out = tmp_path / "e1.json"
        code, stdout, _ = run(capsys, "analyze", "--fixture", "E1",
                              "--json", str(out))
        assert code == 0
        report = json.loads(out.read_text())
        assert report["classification"]["shape"] == "SubsetShaped"
        lam, eta = report["classification"]["start"]
        assert lam == pytest.approx(8.539, abs=0.01)
        assert eta == pytest.approx(math.e, abs=1e-9)
        assert report["classification"]["end"] == ["inf", "inf"]
        assert report["endpoints"]["G"]["value"] == "-inf"
        assert set(report) >= {"input", "landmarks", "conditions",
                               "endpoints", "classification", "warnings",
                               "files"}

    def test_logarithmic_expression_with_numeric_antiderivative(self, capsys):
        # full pipeline on raw text without a supplied antiderivative
        code, stdout, _ = run(capsys, "analyze", "ln(u)")
        assert code == 0
        report = json.loads(stdout)
        assert report["input"]["F_mode"] == "numeric"
        assert report["classification"]["shape"] == "SubsetShaped"
        lam, eta = report["classification"]["start"]
        assert lam == pytest.approx(8.539, abs=0.01)
        assert eta == pytest.approx(math.e, abs=1e-9)

    def test_expression_without_fixture(self, capsys):
        code, stdout, _ = run(capsys, "analyze", "exp(u)-2")
        assert code == 0
        report = json.loads(stdout)
        assert report["classification"]["shape"] == "MonotoneDecreasing"
        assert "C2" in report["classification"]["rule_fired"]
        assert report["classification"]["end"][0] == 0.0
        assert report["input"]["F_mode"] == "numeric"

    def test_nonexistent_curve_exits_zero(self, capsys):
        code, stdout, _ = run(capsys, "analyze", "--fixture", "E5",
                              "--param", "a=1", "--param", "b=2")
        assert code == 0
        report = json.loads(stdout)
        assert report["classification"]["shape"] == "CurveDoesNotExist"
        assert report["endpoints"] is None

    def test_parse_error_exits_nonzero(self, capsys):
        code, _, err = run(capsys, "analyze", "ln(")
        assert code == 2
        assert "error" in err

    def test_missing_expression_rejected(self, capsys):
        code, _, err = run(capsys, "analyze")
        assert code == 2

    def test_override_flag_applies(self, capsys):
        code, stdout, _ = run(capsys, "analyze", "--fixture", "E6",
                              "--assert-limit", "ginf=pos-inf")
        assert code == 0
        report = json.loads(stdout)
        assert report["endpoints"]["kappa"] == 0.0


class TestTrace:
    def test_csv_row_count_and_svg(self, capsys, tmp_path):
        csv_path = tmp_path / "e1.csv"
        svg_path = tmp_path / "e1.svg"
        code, stdout, _ = run(capsys, "trace", "--fixture", "E1", "-n", "64",
                              "-o", str(csv_path), "--svg", str(svg_path))
        assert code == 0
        lines = csv_path.read_text().splitlines()
        assert len(lines) == 65 and lines[0] == "alpha,T,lambda,T_prime"
        assert svg_path.read_text().startswith("<svg ")
        assert "SubsetShaped" in stdout and "minimum" in stdout

    def test_counterexample_errors(self, capsys, tmp_path):
        code, _, err = run(capsys, "trace", "--fixture",
                           "appendix-counterexample",
                           "-o", str(tmp_path / "x.csv"))
        assert code == 2
        assert "not well-defined" in err

    def test_determinism(self, capsys, tmp_path):
        paths = []
        for tag in ("a", "b"):
            csv_path = tmp_path / f"{tag}.csv"
            json_path = tmp_path / f"{tag}.json"
            code, _, _ = run(capsys, "trace", "--fixture", "E7", "-n", "16",
                             "-o", str(csv_path), "--json", str(json_path))
            assert code == 0
            paths.append((csv_path.read_bytes(), json_path.read_bytes()))
        assert paths[0][0] == paths[1][0]
        a = paths[0][1].replace(b"a.csv", b"X.csv")
        b = paths[1][1].replace(b"b.csv", b"X.csv")
        assert a == b


class TestAnalyzeDeterminism:
    def test_byte_identical_reports(self, capsys, tmp_path):
        blobs = []
        for tag in ("a", "b"):
            path = tmp_path / f"{tag}.json"
            code, _, _ = run(capsys, "analyze", "--fixture", "E4",
                             "--json", str(path))
            assert code == 0
            blobs.append(path.read_bytes())
        assert blobs[0] == blobs[1]


class TestVerify:
    def test_quadratic_family_passes(self, capsys):
        code, stdout, _ = run(capsys, "verify", "--fixture", "E5",
                              "--param", "a=1", "--param", "b=4", "-n", "8")
        assert code == 0
        assert "pass" in stdout

    def test_report_includes_verification(self, capsys, tmp_path):
        out = tmp_path / "v.json"
        code, stdout, _ = run(capsys, "verify", "--fixture", "E8", "-n", "8",
                              "--json", str(out))
        assert code == 0
        report = json.loads(out.read_text())
        v = report["verification"]
        assert v["pass"] is True
        assert v["worst_boundary_residual"] <= 1e-5


class TestFixtures:
    def test_listing_contents(self, capsys):
        code, stdout, _ = run(capsys, "fixtures")
        assert code == 0
        for name in ("E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8", "E9",
                     "appendix-counterexample"):
            assert f"{name}: f(u) = " in stdout
        assert "7+4*sqrt(3)" in stdout
        assert "0.038" in stdout


class TestCatalogRegression:
    def test_every_entry_classifies_as_expected(self, pipeline):
        from semibif.fixtures import CATALOG
        for name, fx in CATALOG.items():
            got = pipeline(name).summary.shape.kind.value
            assert fx.expected_shape.startswith(got), (name, got)


class TestHelp:
    def test_grammar_documented(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        assert "expression grammar" in out
        assert "sqrt(x)" in out
        assert "right associative" in out
