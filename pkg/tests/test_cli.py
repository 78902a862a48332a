import csv
import io
import json
import subprocess
import sys

import pytest

from heattrace.cli import dumps, main, parse_config
from heattrace.errors import ConfigError

MODEL = {"type": "rho_series", "odd_coeffs": [0.1, 0.02], "radius": 2.0}


@pytest.fixture
def config(tmp_path):
    def write(data):
        path = tmp_path / "job.json"
        path.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_expand_pure_json(capsys, config):
    code, out, _ = run(capsys, "--config", config({"model": {"type": "pure"}}), "expand", "--order", "1")
    assert code == 0
    data = json.loads(out)
    terms = [(t["num"], t["den"], t["logpow"], t["coeff"]) for t in data["terms"]]
    assert terms[0][:3] == (-1, 2, 0)
    assert terms[0][3] == pytest.approx(0.886226925452758, rel=1e-15)
    assert terms[1:] == [(0, 1, 0, -1.0), (1, 1, 0, 0.25)]
    assert data["remainder"] == {"num": 2, "den": 1}


def test_expand_csv(capsys, config):
    code, out, _ = run(capsys, "--config", config({"model": {"type": "pure"}, "order": 1}), "--format", "csv", "expand")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["num", "den", "logpow", "coeff"]
    assert [r["num"] for r in rows] == ["-1", "0", "1"]


def test_heat_eval_csv(capsys, config):
    cfg = config({"model": MODEL, "grid": {"t_min": 1e-3, "t_max": 1e-1, "per_decade": 4}})
    code, out, _ = run(capsys, "--config", cfg, "heat-eval")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["t", "value", "tail_bound"]
    assert len(rows) == 9
    assert all(float(r["tail_bound"]) <= 1e-14 for r in rows)


def test_heat_eval_harmonic(capsys, config):
    cfg = config({"model": {"type": "pure"}, "power": 1, "grid": {"t_min": 1e-4, "t_max": 1e-2, "per_decade": 2}})
    code, out, _ = run(capsys, "--config", cfg, "heat-eval", "--quantity", "H")
    assert code == 0
    assert len(list(csv.DictReader(io.StringIO(out)))) == 5


def test_parity_scan_table(capsys, config):
    code, out, _ = run(capsys, "--config", config({"model": MODEL}), "parity-scan", "--powers", "1", "2", "3", "4")
    assert code == 0
    rows = json.loads(out)
    kappa = {r["power"]: r["kappa"] for r in rows}
    assert kappa[1] == pytest.approx(-0.1, rel=0.02)
    assert kappa[3] == pytest.approx(-0.01, rel=0.02)
    assert abs(kappa[2]) <= 1e-4 and abs(kappa[4]) <= 1e-4


def test_parity_scan_needs_rho(capsys, config):
    code, _, err = run(capsys, "--config", config({"model": {"type": "pure"}}), "parity-scan")
    assert code == 2
    assert "rho_series" in err


def test_zeta_values(capsys, config):
    code, out, _ = run(capsys, "--config", config({"model": {"type": "pure"}}), "zeta", "--s", "2", "0.3+1i")
    assert code == 0
    rows = json.loads(out)
    assert rows[0]["value"]["re"] == pytest.approx(0.23484850566707, rel=1e-9)
    assert rows[1]["s"] == {"re": 0.3, "im": 1.0}


def test_zeta_special_and_products(capsys, config):
    cfg = config({"model": {"type": "pure"}})
    code, out, _ = run(capsys, "--config", cfg, "zeta-special", "--m", "0", "1", "2")
    assert code == 0
    assert [r["value"] for r in json.loads(out)] == pytest.approx([-1, -0.25, -0.0625])
    code, out, _ = run(capsys, "--config", cfg, "product-coeffs", "--m", "1", "2")
    assert [r["coeff"] for r in json.loads(out)] == pytest.approx([-0.25, 0.03125])


def test_residues(capsys, config):
    code, out, _ = run(capsys, "--config", config({"model": MODEL}), "residues")
    assert code == 0
    rows = json.loads(out)
    assert rows[0]["s"] == {"re": 0.5, "im": 0.0}
    assert rows[0]["residue"]["re"] == pytest.approx(0.5)


def test_empty_config(capsys, config):
    code, _, err = run(capsys, "--config", config(""), "expand")
    assert code == 2
    assert "empty" in err
    code, _, err = run(capsys, "--config", config({}), "expand")
    assert code == 2


@pytest.mark.parametrize(
    "data,needle",
    [
        ('{"model": ', "not valid JSON"),
        ({"offset": 1.5}, "model"),
        ({"model": {"type": "spline"}}, "unknown model"),
        ({"model": {"type": "g_series", "coeffs": [-10.0]}}, "lambda"),
        ({"model": {"type": "rho_series", "odd_coeffs": []}}, "odd_coeffs"),
        ({"model": {"type": "pure"}, "power": "two"}, "power"),
        ({"model": {"type": "pure"}, "grid": {"t_min": 1.0, "t_max": 0.1}}, "grid"),
    ],
)
def test_invalid_configs_exit_two(capsys, config, data, needle):
    code, _, err = run(capsys, "--config", config(data), "expand")
    assert code == 2
    assert needle in err


def test_missing_config_file(capsys, tmp_path):
    code, _, err = run(capsys, "--config", str(tmp_path / "nope.json"), "expand")
    assert code == 2


def test_pole_exits_three(capsys, config):
    code, _, err = run(capsys, "--config", config({"model": MODEL}), "zeta", "--s", "0.5")
    assert code == 3
    assert "pole" in err


def test_deterministic_output(tmp_path, config):
    cfg = config({"model": MODEL, "order": 2})
    outs = []
    for i in range(2):
        path = tmp_path / f"out{i}.json"
        assert main(["--config", cfg, "--out", str(path), "expand"]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_dumps_formatting():
    data = json.loads(dumps({"b": 0.1, "a": [1 / 3, 2 + 1j]}))
    assert list(data) == ["b", "a"]
    assert data["a"] == [1 / 3, {"re": 2, "im": 1}]


def test_parse_config_defaults():
    cfg = parse_config({"model": {"type": "pure"}})
    assert cfg.spec.offset == 1.5 and cfg.spec.power == 2
    assert cfg.grid == {"t_min": 1e-6, "t_max": 1e-1, "per_decade": 8}
    with pytest.raises(ConfigError):
        parse_config([])


def test_module_entry_point(tmp_path):
    path = tmp_path / "job.json"
    path.write_text(json.dumps({"model": {"type": "pure"}}))
    proc = subprocess.run(
        [sys.executable, "-m", "heattrace", "--config", str(path), "zeta", "--s", "0.5"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 3


def test_verify_runs(tmp_path, capsys):
    out = tmp_path / "verify.json"
    code = main(["--out", str(out), "verify"])
    printed = capsys.readouterr().out
    assert code == 0
    assert "14/14 criteria passed" in printed
    rows = json.loads(out.read_text())
    assert [r["number"] for r in rows] == list(range(1, 15))
