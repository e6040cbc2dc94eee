import csv
import json
import subprocess
import sys

import pytest

from critamp.cli import main, short


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_short_formatting():
    assert short(8.86476e-8) == "8.86e-8"
    assert short(1.5936e-8) == "1.59e-8"
    assert short(0.5) == "5.00e-1"


def test_amplitude_fifth_map(capsys, tmp_path):
    out_file = tmp_path / "amp.json"
    code, out, _ = run(capsys, "amplitude", "--weights", "0.1,0,0.9", "--m", "32",
                       "--out", str(out_file))
    assert code == 0
    assert "Omega mean = 1.01288677326" in out
    assert "first harmonic = 1.59e-8" in out
    data = json.loads(out_file.read_text())
    assert data["config"]["weights"] == ["1/10", "0", "9/10"]
    assert float(data["Omega"]["mean"]["value"]) == pytest.approx(1.01288677326, abs=1e-9)


def test_amplitude_quarter_map(capsys):
    code, out, err = run(capsys, "amplitude", "--m", "32")
    assert code == 0
    assert "Omega mean = 1.33381" in err
    assert "oscillation max-min = 8.86e-8" in err
    assert json.loads(out)["config"]["dps"] == 60


def test_free_energy_csv(capsys):
    code, out, err = run(capsys, "free-energy", "--h-grid", "0.1,1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# config: ")
    rows = list(csv.reader(lines[1:]))
    assert rows[0] == ["h", "value", "err"] and len(rows) == 3
    assert "F(1.0)" in err or "F(1)" in err


def test_free_energy_critical_route(capsys):
    code, out, _ = run(capsys, "free-energy", "--h-grid", "1e-3", "--route", "critical")
    assert code == 0
    assert json.loads(out.splitlines()[0][len("# config: "):])["extra"]["route"] == "critical"


def test_series_dump(capsys):
    code, out, err = run(capsys, "series", "--weights", "0.1,0,0.9", "--dps", "40")
    assert code == 0
    data = json.loads(out)
    assert set(data) >= {"config", "g", "g_inverse", "phi"}
    assert float(data["g"]["envelope"]["C"]) <= 5e-6
    assert "g: C =" in err


def test_omega_csv_and_json(capsys):
    code, out, err = run(capsys, "omega", "--weights", "0.1,0,0.9", "--m", "16",
                         "--harmonics", "2")
    assert code == 0 and len(out.splitlines()) == 18
    assert "omega mean = 4.4514027300" in err
    code, out, _ = run(capsys, "omega", "--weights", "0.1,0,0.9", "--m", "16",
                       "--harmonics", "2", "--format", "json")
    assert len(json.loads(out)["samples"]) == 16


def test_harris(capsys):
    code, out, _ = run(capsys, "harris", "--s-grid", "1,2", "--boettcher")
    assert code == 0
    points = json.loads(out)["points"]
    assert len(points) == 2 and "psi_boettcher" in points[0]


def test_simulate_is_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(capsys, "simulate", "--samples", "5000", "--seed", "11", "--out",
                   str(path))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_julia(capsys):
    code, out, _ = run(capsys, "julia", "--points", "16")
    assert code == 0 and len(out.splitlines()) == 18
    code, out, _ = run(capsys, "julia", "--method", "preimage", "--depth", "4")
    assert len(out.splitlines()) == 18


def test_map_file(capsys, tmp_path):
    path = tmp_path / "map.json"
    path.write_text(json.dumps({"weights": [0.25, 0, 0.75]}))
    code, out, _ = run(capsys, "free-energy", "--map-file", str(path), "--h-grid", "1")
    assert code == 0


def test_errors_are_json(capsys):
    code, out, err = run(capsys, "free-energy", "--weights", "0.5,0.5,0.5", "--h-grid", "1")
    assert code == 1 and out == ""
    payload = json.loads(err)
    assert payload["type"] == "DomainError" and payload["command"] == "free-energy"


def test_console_script_entry():
    result = subprocess.run([sys.executable, "-m", "critamp.cli", "--version"],
                            capture_output=True, text=True)
    assert result.returncode == 0 and result.stdout.strip()
