import json

import pytest

from curvops.cli import main

MBETA = ["--family", "mbeta", "--beta", "1", "--point", "0,0,1,1"]


def _report(capsys):
    return json.loads(capsys.readouterr().out)


def test_catalog_list(capsys):
    assert main(["catalog", "list"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 6
    assert any(line.startswith("mbeta") for line in lines)


def test_catalog_list_json(capsys):
    assert main(["catalog", "list", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["families"]) == 6


def test_curvature_report_envelope(capsys):
    assert main(["curvature", *MBETA, "--no-timestamp"]) == 0
    report = _report(capsys)
    assert report["tool"] == "curvops"
    assert report["command"] == "curvature"
    assert report["chart"]["family"] == "mbeta"
    assert report["chart"]["beta"] == 1.0
    assert "generated_at" not in report
    assert report["result"]["scalar"] == pytest.approx(-1.0)


def test_curvature_timestamp_by_default(capsys):
    assert main(["curvature", *MBETA]) == 0
    assert "generated_at" in _report(capsys)


def test_output_file(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["curvature", *MBETA, "--no-timestamp", "--output", str(out)])
    assert code == 0
    assert "report written to" in capsys.readouterr().out
    assert json.loads(out.read_text())["command"] == "curvature"


def test_reports_byte_identical(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        code = main(
            ["decompose", *MBETA, "--seed", "11", "--no-timestamp", "--output", str(path)]
        )
        assert code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_check_skew_tsankov_passes(capsys):
    code = main(
        [
            "check",
            "skew-tsankov",
            "--family",
            "lorentz_mf",
            "--preset",
            "s_plus",
            "--point",
            "0,0,0",
            "--no-timestamp",
        ]
    )
    assert code == 0
    report = _report(capsys)
    assert report["result"]["passed"] is True
    assert report["result"]["commutativity"]["passed"] is True


def test_check_nilpotency_expect(capsys):
    argv = [
        "check",
        "nilpotency",
        "--family",
        "dunn",
        "--p",
        "2",
        "--psi",
        "x2*x2,0;0,0",
        "--point",
        "0,0,0,0",
        "--no-timestamp",
        "--expect",
    ]
    assert main(argv + ["2"]) == 0
    assert "nilpotency order 2" in capsys.readouterr().out
    assert main(argv + ["3"]) == 1
    assert "expected 3" in capsys.readouterr().err


def test_decompose_chart_point(capsys):
    assert main(["decompose", *MBETA, "--no-timestamp"]) == 0
    result = _report(capsys)["result"]
    assert result["block_count"] >= 1
    assert len(result["eigencurvatures"]) == result["block_count"]


def test_decompose_rejects_asymmetric_model(tmp_path, capsys):
    # a lone orbit entry at (0,1,2,3) breaks the Bianchi sum
    doc = {
        "dim": 4,
        "inner": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        "entries": [[0, 1, 2, 3, 0.5]],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert main(["decompose", "--model-file", str(path)]) == 1
    assert "bianchi" in capsys.readouterr().err


def test_decompose_missing_model_file(tmp_path, capsys):
    code = main(["decompose", "--model-file", str(tmp_path / "nope.json")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_decompose_malformed_model_file(tmp_path, capsys):
    path = tmp_path / "garbled.json"
    path.write_text("{not json")
    assert main(["decompose", "--model-file", str(path)]) == 2


def test_geodesic_with_csv(tmp_path, capsys):
    csv_path = tmp_path / "traj.csv"
    code = main(
        [
            "geodesic",
            "--family",
            "lorentz_mf",
            "--preset",
            "s_plus",
            "--point",
            "0,0,0",
            "--velocity",
            "0.3,0.2,0.5",
            "--horizon",
            "2",
            "--csv",
            str(csv_path),
            "--no-timestamp",
        ]
    )
    assert code == 0
    report = _report(capsys)
    assert report["result"]["status"] == "horizon_reached"
    assert report["result"]["s_end"] == pytest.approx(2.0)
    header = csv_path.read_text().splitlines()[0]
    assert header.startswith("affine_param,")


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        '[chart]\nfamily = "lorentz_mf"\npreset = "s_plus"\n\n'
        '[parameters]\npoint = [0.0, 0.0, 0.0]\nvelocity = [0.3, 0.2, 0.5]\n'
        "horizon = 1.0\n"
    )
    assert main(["geodesic", "--config", str(cfg), "--no-timestamp"]) == 0
    assert _report(capsys)["result"]["s_end"] == pytest.approx(1.0)
    # an explicit flag wins over the config value
    code = main(["geodesic", "--config", str(cfg), "--horizon", "3", "--no-timestamp"])
    assert code == 0
    assert _report(capsys)["result"]["s_end"] == pytest.approx(3.0)


def test_config_rejects_unknown_parameter(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text(
        '[chart]\nfamily = "mbeta"\nbeta = 1.0\n\n[parameters]\nhorizn = 1.0\n'
    )
    assert main(["geodesic", "--config", str(cfg)]) == 2
    assert "horizn" in capsys.readouterr().err


def test_config_rejects_unknown_table(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text('[chart]\nfamily = "mbeta"\nbeta = 1.0\n\n[extras]\nx = 1\n')
    assert main(["curvature", "--config", str(cfg), "--point", "0,0,1,1"]) == 2


def test_config_conflicts_with_inline_flags(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('[chart]\nfamily = "mbeta"\nbeta = 1.0\n')
    code = main(["curvature", "--config", str(cfg), "--family", "mbeta", "--point", "0,0,1,1"])
    assert code == 2
    assert "not both" in capsys.readouterr().err


def test_unknown_family_exits_two(capsys):
    assert main(["curvature", "--family", "moebius", "--point", "0"]) == 2


def test_wrong_point_length(capsys):
    assert main(["curvature", "--family", "mbeta", "--beta", "1", "--point", "0,0,1"]) == 2
    assert "dimension 4" in capsys.readouterr().err


def test_missing_point(capsys):
    assert main(["curvature", "--family", "mbeta", "--beta", "1"]) == 2
    assert "missing --point" in capsys.readouterr().err


def test_point_outside_domain_exits_two(capsys):
    code = main(["curvature", "--family", "mbeta", "--beta", "1", "--point", "0,0,-1,1"])
    assert code == 2


def test_probe_blowup_prints_summary(capsys):
    code = main(
        [
            "probe",
            "blowup",
            *MBETA[:4],
            "--point",
            "1,1,1,1",
            "--velocity",
            "0,0,-1,0",
            "--horizon",
            "2",
            "--monitor",
            "scalar_curvature",
            "--no-timestamp",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "crossed" in out


def test_verify_paper_subset(capsys):
    assert main(["verify", "paper", "--criteria", "3", "--no-timestamp"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "all 1 criteria passed" in out


def test_verify_paper_subset_report(tmp_path, capsys):
    out = tmp_path / "verify.json"
    code = main(
        ["verify", "paper", "--criteria", "3", "--no-timestamp", "--output", str(out)]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] is True
    [entry] = doc["criteria"]
    assert entry["number"] == 3
    assert entry["passed"] is True
