"""End-to-end CLI runs: exit codes, output files, determinism."""

import json
import textwrap

import pytest

from deadcore.cli import main
from deadcore.params import classify_region

MODERATE_CFG = textwrap.dedent("""\
    a = 1,0
    b = 1,0
    m = 0.5
    n_nodes = 65
    source_kind = plateau
    source_params = r0=0; r1=0.3; height=0.5
    solver = newton
    tol = 1e-9
    max_iter = 20000
""")

RING_CFG = textwrap.dedent("""\
    a = 1,0
    b = 0,1
    m = 0.5
    n_nodes = 129
    source_kind = ring
    source_params = center=1.2; width=0.2; height=0.1
    solver = newton
    tol = 1e-9
    max_iter = 20000
""")

DEAD_PICARD_CFG = textwrap.dedent("""\
    a = 1,0
    b = 0,1
    m = 0.5
    n_nodes = 65
    source_kind = plateau
    source_params = r0=0; r1=0.3; height=0.1
    solver = picard
    tol = 1e-9
    max_iter = 200
""")


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_check_params_reports_constants(tmp_path, capsys):
    out = tmp_path / "p.json"
    code = main(["check-params", "--a", "1,0", "--b", "0,1",
                 "--out", str(out)])
    captured = capsys.readouterr().out
    assert code == 0
    doc = json.loads(captured)
    assert doc["in_A"] and doc["in_B"] and doc["exists"] and doc["unique"]
    assert doc["constants"]["L"] == 1.0
    assert doc["constants"]["M"] == 2.0
    # the JSON file is exactly the stdout document
    assert out.read_text() == captured


def test_check_params_non_admissible(capsys):
    # leading dash needs the = form or argparse eats it as a flag
    code = main(["check-params", "--a", "1,0", "--b=-1,0"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 0
    assert doc["exists"] is False
    assert doc["constants"] is None


def test_check_params_bad_complex(capsys):
    code = main(["check-params", "--a", "nope", "--b", "0,1"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 2
    assert doc["error"]["reason"] == "bad_input"


def test_solve_writes_outputs(tmp_path, capsys):
    cfg = _write(tmp_path, "moderate.cfg", MODERATE_CFG)
    outdir = tmp_path / "run"
    code = main(["solve", "--config", cfg, "--out", str(outdir)])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["converged"] is True
    report = json.loads((outdir / "report.json").read_text())
    assert report["converged"] and report["method"] == "newton"
    assert report["residual"] <= 1e-9
    assert report["bounds"]["pass1"] and report["bounds"]["pass2"]
    assert set(report["constants"]) >= {"L", "M", "L1", "M0"}
    manifest = json.loads((outdir / "manifest.json").read_text())
    assert manifest["a"] == "1,0" and manifest["n_nodes"] == 65
    sol = (outdir / "solution.csv").read_text().splitlines()
    assert sol[0] == "r,re_u,im_u"
    assert len(sol) == 1 + 65


def test_solve_method_override(tmp_path):
    cfg = _write(tmp_path, "moderate_picard.cfg",
                 MODERATE_CFG.replace("solver = newton", "solver = picard"))
    outdir = tmp_path / "run"
    code = main(["solve", "--config", cfg, "--method", "newton",
                 "--out", str(outdir)])
    assert code == 0
    report = json.loads((outdir / "report.json").read_text())
    assert report["method"] == "newton" and report["converged"]


def test_solve_determinism(tmp_path, capsys):
    cfg = _write(tmp_path, "moderate.cfg", MODERATE_CFG)
    d1, d2 = tmp_path / "r1", tmp_path / "r2"
    assert main(["solve", "--config", cfg, "--out", str(d1)]) == 0
    assert main(["solve", "--config", cfg, "--out", str(d2)]) == 0
    capsys.readouterr()
    for name in ("report.json", "solution.csv", "manifest.json"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_solve_nonconvergence_exit3(tmp_path, capsys):
    cfg = _write(tmp_path, "dead.cfg", DEAD_PICARD_CFG)
    outdir = tmp_path / "run"
    code = main(["solve", "--config", cfg, "--out", str(outdir)])
    out = capsys.readouterr().out
    assert code == 3
    assert '"non_convergence"' in out
    # the report is still written so the run can be inspected
    report = json.loads((outdir / "report.json").read_text())
    assert report["converged"] is False


def test_solve_bad_config_exit2(tmp_path, capsys):
    cfg = _write(tmp_path, "broken.cfg", "a = 1,0\n")  # b missing
    code = main(["solve", "--config", cfg])
    doc = json.loads(capsys.readouterr().out)
    assert code == 2
    assert doc["error"]["reason"] == "bad_input"
    cfg2 = _write(tmp_path, "unknown.cfg", "a = 1,0\nb = 0,1\nmystery = 3\n")
    assert main(["solve", "--config", cfg2]) == 2
    capsys.readouterr()


def test_analyze_success(tmp_path, capsys):
    cfg = _write(tmp_path, "ring.cfg", RING_CFG)
    outdir = tmp_path / "an"
    code = main(["analyze", "--config", cfg, "--rho0", "0.8",
                 "--out", str(outdir)])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["rho0"] == 0.8
    assert doc["verdicts"]["source_free_ball"] is True
    assert doc["verdicts"]["prediction_contained"] is True
    assert 0.0 <= doc["rho_max_predicted"] <= doc["observed_zero_ball_radius"] + 0.1
    assert set(doc["thresholds"]) == {
        "E_star", "eps_star", "smallness_energy_rhs", "smallness_mass_rhs",
        "delta0", "epsilon"}
    for name in ("report.json", "solution.csv", "profiles.csv",
                 "manifest.json"):
        assert (outdir / name).exists()
    profiles = (outdir / "profiles.csv").read_text().splitlines()
    assert profiles[0] == "rho,E,b,m2,I,J"
    assert len(profiles) == 1 + 129


def test_analyze_rejects_live_source_ball(tmp_path, capsys):
    # plateau source is live at the origin, so no source-free ball exists
    cfg = _write(tmp_path, "moderate.cfg", MODERATE_CFG)
    code = main(["analyze", "--config", cfg, "--rho0", "0.8"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 2
    assert doc["error"]["reason"] == "hypothesis_failed"


def test_scan_params_fixed_a(tmp_path, capsys):
    out = tmp_path / "b_plane.csv"
    code = main(["scan-params", "--vertex", "--n", "5", "--fix-a", "1,0",
                 "--out", str(out)])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["rows"] == 25
    lines = out.read_text().splitlines()
    assert lines[0] == "re_a,im_a,re_b,im_b,in_A,in_B,exists,unique"
    assert len(lines) == 26
    # every row agrees with the library classification
    for line in lines[1:]:
        re_a, im_a, re_b, im_b, *flags = line.split(",")
        want = classify_region(complex(float(re_a), float(im_a)),
                               complex(float(re_b), float(im_b)))
        assert [int(f) for f in flags] == [
            int(want["in_A"]), int(want["in_B"]),
            int(want["exists"]), int(want["unique"])]


def test_scan_params_centered_default(tmp_path, capsys):
    out = tmp_path / "a_plane.csv"
    code = main(["scan-params", "--n", "4", "--fix-b", "0,0",
                 "--out", str(out)])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["rows"] == 16
    lines = out.read_text().splitlines()
    assert len(lines) == 17
    # cell centers of [-2, 2] with n = 4, row-major in (re_a, im_a)
    assert lines[1] == "-1.5,-1.5,0,0,1,1,1,0"
    assert lines[-1] == "1.5,1.5,0,0,1,1,1,1"


def test_verify_inequalities_cli(tmp_path, capsys):
    out = tmp_path / "ineq.json"
    code = main(["verify-inequalities", "--samples", "2000", "--seed", "1",
                 "--out", str(out)])
    captured = capsys.readouterr().out
    assert code == 0
    lines = [l for l in captured.splitlines() if l.strip()]
    assert len(lines) == 5
    assert all(" pass " in l for l in lines)
    doc = json.loads(out.read_text())
    assert doc["which"] == "all" and len(doc["results"]) == 5
    assert all(r["passed"] for r in doc["results"])


def test_verify_inequalities_single(capsys):
    code = main(["verify-inequalities", "--which", "young",
                 "--samples", "500"])
    captured = capsys.readouterr().out
    assert code == 0
    assert len([l for l in captured.splitlines() if l.strip()]) == 1


def test_stability_cli(tmp_path, capsys):
    cfg = _write(tmp_path, "moderate.cfg", MODERATE_CFG)
    outdir = tmp_path / "stab"
    code = main(["stability", "--config", cfg, "--pairs", "2",
                 "--starts", "3", "--seed", "0", "--out", str(outdir)])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc == {"pairs_passed": 2, "pairs_total": 2, "unique": True,
                   "energy_ok": True, "all_passed": True}
    detail = json.loads((outdir / "stability.json").read_text())
    assert len(detail["pairs"]) == 2
    assert detail["probe"]["n_starts"] == 3
    assert (outdir / "manifest.json").exists()


def test_calibrate_cli(tmp_path, capsys):
    cfg = _write(tmp_path, "ring.cfg", RING_CFG)
    outdir = tmp_path / "cal"
    code = main(["calibrate", "--config", cfg, "--rho0", "0.8",
                 "--scales", "0.5,1.0", "--out", str(outdir)])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["C_cal"] >= 1.0
    cal = json.loads((outdir / "calibration.json").read_text())
    assert cal["scales"] == [0.5, 1.0]
    assert len(cal["instances"]) == 2


def test_calibrate_bad_scales(tmp_path, capsys):
    cfg = _write(tmp_path, "ring.cfg", RING_CFG)
    code = main(["calibrate", "--config", cfg, "--rho0", "0.8",
                 "--scales", ",,"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 2
    assert doc["error"]["reason"] == "bad_input"


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip()
