import pytest

from slowbeams.cli import run_command
from slowbeams.report import ReportError, build_report


def test_empty_directory_refused(tmp_path, capsys):
    with pytest.raises(ReportError):
        build_report(tmp_path)
    assert run_command(["report", str(tmp_path)]) == 1


@pytest.fixture
def focus_run(tmp_path, capsys):
    assert run_command(["focus-sim", "--n", "2000", "--power", "269kW", "--output-dir",
                        str(tmp_path), "--quiet"]) == 0
    capsys.readouterr()
    return tmp_path


def test_focus_run_gets_gain_verdict(focus_run, capsys):
    assert run_command(["report", str(focus_run)]) == 0
    out = capsys.readouterr().out
    assert "forward gain at 269000 W (single field)" in out
    assert "band [1.5, 3]" in out
    assert (focus_run / "report.md").is_file()


def test_nan_in_csv_is_flagged(focus_run, capsys):
    path = focus_run / "summary.csv"
    lines = path.read_text().splitlines()
    fields = lines[-1].split(",")
    fields[3] = "nan"
    lines[-1] = ",".join(fields)
    path.write_text("\n".join(lines) + "\n")
    assert run_command(["report", str(focus_run)]) == 2
    captured = capsys.readouterr()
    assert "gain" in captured.err
    assert "column `gain` contains non-finite values" in (focus_run / "report.md").read_text()


def test_ramp_and_fit_sections(tmp_path, capsys):
    run_command(["synth-ramp", "--output-dir", str(tmp_path), "--quiet"])
    run_command(["sample-source", "--n", "100000", "--output-dir", str(tmp_path), "--quiet"])
    run_command(["fit-velocity", str(tmp_path / "velocities.csv"), "--output-dir", str(tmp_path),
                 "--quiet"])
    capsys.readouterr()
    rep = build_report(tmp_path)
    labels = [label for label, _ in rep.verdicts]
    assert {"drift", "temperature", "Arrhenius slope"} <= set(labels)
    assert all(ok for _, ok in rep.verdicts)
