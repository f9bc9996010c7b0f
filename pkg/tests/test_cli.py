import json
import math

import pytest

from slowbeams.cli import run_command
from slowbeams.tables import read_csv


def run(capsys, *argv):
    code = run_command(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def values(out):
    return dict(line.split("=", 1) for line in out.splitlines() if "=" in line)


def test_potential_one_watt(capsys, tmp_path):
    code, out, _ = run(capsys, "potential", "--alpha", "200A3", "--power", "1W",
                       "--waist", "100um", "--output-dir", str(tmp_path), "--quiet")
    assert code == 0
    assert values(out)["U_eV"] == "3.3e-09"
    assert (tmp_path / "manifest.ini").is_file()


def test_digits_flag(capsys, tmp_path):
    _, out, _ = run(capsys, "potential", "--alpha", "200A3", "--power", "60kW", "--digits", "4",
                    "--output-dir", str(tmp_path), "--quiet")
    assert values(out)["U_eV"] == "1.999e-04"


def test_json_summary(capsys, tmp_path):
    code, out, _ = run(capsys, "stop-power", "--energy", "50meV", "--output-dir",
                       str(tmp_path), "--json-summary")
    assert code == 0
    assert json.loads(out)["P_W"] == pytest.approx(1.5e7, rel=0.05)


def test_unknown_subcommand(capsys):
    code, _, err = run(capsys, "teleport")
    assert code == 1
    assert "usage" in err.lower()


def test_missing_subcommand(capsys):
    assert run(capsys)[0] == 1


def test_bad_unit(capsys, tmp_path):
    code, _, err = run(capsys, "potential", "--waist", "100furlong", "--output-dir", str(tmp_path))
    assert code == 1
    assert "furlong" in err


def test_bad_config_value(capsys, tmp_path):
    ini = tmp_path / "bad.ini"
    ini.write_text("[selector]\nfwhm_rel = 1.5\n")
    code, _, err = run(capsys, "selector", "--config", str(ini), "--output-dir", str(tmp_path))
    assert code == 1
    assert "fwhm_rel" in err


def test_missing_config(capsys, tmp_path):
    code, _, err = run(capsys, "potential", "--config", str(tmp_path / "x.ini"))
    assert code == 1
    assert "not found" in err


def test_ramp_round_trip_through_files(capsys, tmp_path):
    code, _, _ = run(capsys, "synth-ramp", "--compound", "perfluoroC60-n9", "--noise", "0",
                     "--output-dir", str(tmp_path), "--quiet")
    assert code == 0
    code, out, _ = run(capsys, "fit-arrhenius", str(tmp_path / "ramp.csv"), "--molecule", "perfluoroC60-n9",
                       "--output-dir", str(tmp_path), "--quiet", "--digits", "6")
    assert code == 0
    assert float(values(out)["dH_kJmol"]) == pytest.approx(217.0, rel=1e-3)
    t = read_csv(tmp_path / "enthalpy.csv")
    assert t.column("molecule") == ["perfluoroC60-n9"]


def test_unknown_molecule(capsys, tmp_path):
    run(capsys, "synth-ramp", "--output-dir", str(tmp_path), "--quiet")
    code, _, err = run(capsys, "fit-arrhenius", str(tmp_path / "ramp.csv"), "--molecule", "unobtainium",
                       "--output-dir", str(tmp_path))
    assert code == 1
    assert "unobtainium" in err


def test_source_fit_pipeline(capsys, tmp_path):
    assert run(capsys, "sample-source", "--n", "200000", "--output-dir", str(tmp_path),
               "--quiet")[0] == 0
    code, out, _ = run(capsys, "fit-velocity", str(tmp_path / "velocities.csv"),
                       "--output-dir", str(tmp_path), "--quiet", "--digits", "4")
    assert code == 0
    v = values(out)
    assert abs(float(v["drift_mps"]) - 51.0) <= 1.0
    assert abs(float(v["T_K"]) - 302.0) <= 10.0


def test_env_output_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SLOWBEAMS_OUTPUT_DIR", str(tmp_path / "env"))
    assert run(capsys, "potential", "--quiet")[0] == 0
    assert (tmp_path / "env" / "manifest.ini").is_file()
    # the flag still wins over the environment
    assert run(capsys, "potential", "--quiet", "--output-dir", str(tmp_path / "flag"))[0] == 0
    assert (tmp_path / "flag" / "manifest.ini").is_file()


def test_seed_reproducible_bytes(capsys, tmp_path):
    for d in ("a", "b"):
        assert run(capsys, "focus-sim", "--n", "300", "--power", "60kW", "--seed", "5",
                   "--output-dir", str(tmp_path / d), "--quiet")[0] == 0
    for name in ("summary.csv", "final_velocities.csv", "trajectories.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    run(capsys, "focus-sim", "--n", "300", "--power", "60kW", "--seed", "6",
        "--output-dir", str(tmp_path / "c"), "--quiet")
    assert ((tmp_path / "a" / "final_velocities.csv").read_bytes()
            != (tmp_path / "c" / "final_velocities.csv").read_bytes())


def test_cool_sim_outputs(capsys, tmp_path):
    code, out, _ = run(capsys, "cool-sim", "--n", "100", "--power", "3kW",
                       "--output-dir", str(tmp_path), "--quiet")
    assert code == 0
    trace = read_csv(tmp_path / "cooling_trace_3000W.csv")
    assert trace.columns == ("t_s", "KE_J", "photon_n", "theta")
    assert math.isfinite(float(values(out)["ke_ratio_3000W"]))


def test_threshold_needs_three_powers(capsys, tmp_path):
    code, _, err = run(capsys, "threshold-scan", "--power", "1kW", "3kW",
                       "--output-dir", str(tmp_path))
    assert code == 1
    assert "three" in err


def test_threshold_not_found_exit_code(capsys, tmp_path):
    code, _, err = run(capsys, "threshold-scan", "--n", "50", "--power", "0", "0", "0",
                       "--output-dir", str(tmp_path))
    assert code == 2
    assert "threshold above scan range" in err
