import numpy as np

from nlcompete.cli import main


COEX_CFG = """
grid.n = 60
coef.b = const 0.5
coef.c = const 0.5
init.u = const 0.3
init.v = const 0.5
controls.horizon = 150
controls.n_inits = 2
rng.seed = 5
"""


def write_cfg(tmp_path, text, name="scenario.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_steady_writes_report_csv_and_figure(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "grid.n = 60\n")
    out = tmp_path / "out"
    assert main(["steady", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "report.txt").exists()
    assert (out / "steady_states.png").exists()
    csv_text = (out / "steady_states.csv").read_text().splitlines()
    assert csv_text[0] == "x,u_d,v_D"
    assert len(csv_text) == 61
    # m = M = 1 by default, so both steady states are the unit constant
    x, ud, vd = csv_text[1].split(",")
    assert abs(float(ud) - 1.0) < 1e-8 and abs(float(vd) - 1.0) < 1e-8
    assert "lambda*" in capsys.readouterr().out


def test_quiet_suppresses_stdout(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "grid.n = 60\noutput.figures = off\n")
    assert main(["steady", "--config", cfg, "--out", str(tmp_path / "o"), "--quiet"]) == 0
    assert capsys.readouterr().out == ""


def test_stability_reports_exponents(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "grid.n = 60\ncoef.b = const 0.25\ncoef.c = const 2.0\n")
    assert main(["stability", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    text = (tmp_path / "o" / "report.txt").read_text()
    assert "mu = 0.75" in text
    assert "nu = -1" in text


def test_simulate_writes_deterministic_run_csv(tmp_path):
    cfg = write_cfg(tmp_path, COEX_CFG)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "a"), "--quiet"]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "b"), "--quiet"]) == 0
    a = (tmp_path / "a" / "run_0.csv").read_bytes()
    b = (tmp_path / "b" / "run_0.csv").read_bytes()
    assert a == b
    lines = a.decode().splitlines()
    assert lines[0] == "# nlcompete run schema 1"
    assert lines[1] == "t,theta,eta,energy_E,l2_u,l2_v,sup_dist_to_attractor"
    assert lines[2].startswith("0,")


def test_classify_full_report_path(tmp_path):
    cfg = write_cfg(tmp_path, COEX_CFG)
    out = tmp_path / "out"
    assert main(["classify", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    text = (out / "report.txt").read_text()
    assert "case = both_unstable" in text
    assert "prediction = unique_coexistence_GAS" in text
    assert "verification: 2/2" in text
    assert "certified=True" in text
    # delimited output sits alongside the rendered figures
    for name in (
        "steady_states.csv",
        "run_0.csv",
        "run_1.csv",
        "steady_states.png",
        "diagnostics.png",
        "final_states.png",
    ):
        assert (out / name).exists(), name


def test_classify_respects_figures_off(tmp_path):
    cfg = write_cfg(tmp_path, COEX_CFG + "output.figures = off\n")
    out = tmp_path / "out"
    assert main(["classify", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    assert (out / "steady_states.csv").exists()
    assert not list(out.glob("*.png"))


def test_seed_override_changes_report(tmp_path):
    cfg = write_cfg(tmp_path, COEX_CFG)
    assert main(["steady", "--config", cfg, "--out", str(tmp_path / "a"), "--quiet"]) == 0
    assert main(
        ["steady", "--config", cfg, "--out", str(tmp_path / "b"), "--quiet", "--seed", "9"]
    ) == 0
    assert "seed: 5" in (tmp_path / "a" / "report.txt").read_text()
    assert "seed: 9" in (tmp_path / "b" / "report.txt").read_text()


def test_sweep_rows_and_map(tmp_path):
    cfg = write_cfg(
        tmp_path,
        "grid.n = 60\n"
        "sweep.b = list 0.5 1.0\n"
        "sweep.c = list 0.5 1.0\n"
        "controls.verify = off\n",
    )
    out = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "# nlcompete sweep schema 1"
    assert lines[1].split(",")[:2] == ["b", "c"]
    assert len(lines) == 6  # schema + header + 4 cells
    cases = {tuple(l.split(",")[:2]): l.split(",")[4] for l in lines[2:]}
    assert cases[("1", "1")] == "degenerate"
    assert cases[("0.5", "0.5")] == "both_unstable"
    assert (out / "sweep_map.png").exists()


# --- failure exit codes -------------------------------------------------------

def test_exit_2_on_config_trouble(tmp_path, capsys):
    missing = str(tmp_path / "absent.cfg")
    assert main(["steady", "--config", missing, "--out", str(tmp_path / "o")]) == 2
    bad = write_cfg(tmp_path, "grid.n = fast\n", "bad.cfg")
    assert main(["steady", "--config", bad, "--out", str(tmp_path / "o")]) == 2
    empty_axis = write_cfg(tmp_path, "sweep.b = list\n", "axis.cfg")
    assert main(["sweep", "--config", empty_axis, "--out", str(tmp_path / "o")]) == 2
    assert "config error" in capsys.readouterr().err


def test_exit_3_when_a_semitrivial_is_missing(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "grid.n = 60\ncoef.m = const -1\n")
    assert main(["stability", "--config", cfg, "--out", str(tmp_path / "o")]) == 3
    assert "hypothesis violation" in capsys.readouterr().err


def test_exit_4_on_strong_competition(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "grid.n = 60\ncoef.b = const 2\ncoef.c = const 2\n")
    assert main(["classify", "--config", cfg, "--out", str(tmp_path / "o")]) == 4
    assert "unsupported regime" in capsys.readouterr().err


def test_exit_5_on_numerical_failure(tmp_path, capsys):
    # growth bound 1e-6 exceeds the neutral band but converges too slowly
    cfg = write_cfg(tmp_path, "grid.n = 60\ncoef.m = const 1e-6\noutput.figures = off\n")
    assert main(["steady", "--config", cfg, "--out", str(tmp_path / "o")]) == 5
    assert "numerical failure" in capsys.readouterr().err


# --- built-in acceptance ------------------------------------------------------

def test_verify_subset_passes_and_writes_summary(tmp_path, capsys):
    out = tmp_path / "acc"
    assert main(["verify", "--criteria", "1", "--out", str(out)]) == 0
    text = (out / "acceptance.txt").read_text()
    assert "[ 1] PASS" in text
    assert "1/1 criteria passed" in text
    assert "[ 1] PASS" in capsys.readouterr().out


def test_verify_force_fail_is_reported(tmp_path, capsys):
    out = tmp_path / "acc"
    assert main(["verify", "--criteria", "1", "--force-fail", "1", "--out", str(out)]) == 1
    assert "FAIL" in capsys.readouterr().out
