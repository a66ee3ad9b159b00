import csv
import io
import json
import math

import pytest

from anyonvmc.cli import RunConfig, main, parse_grid, read_config_echo


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def _csv_rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_fractionality_examples(capsys):
    code, out = run(capsys, "fractionality", "--alpha", "1/3", "--n-max", "8")
    rows = json.loads(out)["result"]["rows"]
    assert code == 0 and [r["n"] for r in rows] == list(range(2, 9))
    assert all(r["alpha_n"] == "1/3" for r in rows)
    code, out = run(capsys, "fractionality", "--alpha", "2/3", "--n-max", "6", "--format", "csv")
    rows = _csv_rows(out)
    assert rows[0]["alpha_n"] == "2/3" and all(r["alpha_n"] == "0" for r in rows[1:])


def test_fractionality_sweep(capsys):
    code, out = run(capsys, "fractionality", "--sweep", "--q-max", "3", "--alpha-max", "1", "--format", "csv")
    rows = {r["alpha"]: r for r in _csv_rows(out)}
    assert rows["1"]["alpha_star"] == "1" and abs(float(rows["1"]["jprime_alpha_star"]) - 1.8412) < 1e-4
    assert rows["1/3"]["alpha_star"] == "1/3" and rows["2/3"]["alpha_star"] == "0"


def test_bounds_examples(capsys):
    code, out = run(capsys, "bounds", "--alpha", "2/3", "--n", "6", "--L", "-6", "--format", "csv")
    rows = {r["bound"]: r for r in _csv_rows(out)}
    assert code == 0 and rows["cs"]["value"] == "10"
    assert all(r["source"] for r in rows.values())
    assert "# missing:" in out
    code, out = run(capsys, "bounds", "--alpha", "0", "--n", "5", "--format", "csv")
    rows = {r["bound"]: r for r in _csv_rows(out)}
    assert float(rows["bosonic"]["value"]) == 5.0
    assert float(rows["harmonic_lower"]["value"]) == 0 and float(rows["average_field"]["value"]) == 0


def test_bounds_gas_regimes(capsys):
    code, out = run(capsys, "bounds", "--alpha", "1", "--n", "4", "--density", "4", "--R", "1.0", "--format", "csv")
    rows = {r["bound"]: r for r in _csv_rows(out)}
    assert "gas_dilute" in rows and "gas_dense" in rows
    assert abs(float(rows["gas_dense"]["value"]) - 2 * math.pi) < 1e-12


def test_verify_examples(capsys):
    code, out = run(capsys, "verify", "eigen", "--alpha", "2/3", "--n", "6", "--cases", "10")
    res = json.loads(out)["result"]
    assert code == 0 and res["pass"] and res["max"] < 1e-5
    code, out = run(capsys, "verify", "clustering", "--mu", "2", "--nu", "3", "--k", "2", "--exact")
    res = json.loads(out)["result"]
    assert code == 0 and res["max"] == 0
    code, out = run(capsys, "verify", "pauli", "--alpha", "0.37", "--n", "4", "--R", "0.5", "--cases", "10")
    assert code == 0 and json.loads(out)["result"]["pass"]
    for which in ("laughlin", "current", "gradients"):
        code, out = run(capsys, "verify", which, "--cases", "5")
        assert code == 0, which


def test_verify_failure_exit_code(capsys):
    code, out = run(capsys, "verify", "eigen", "--alpha", "2/3", "--n", "3", "--cases", "3", "--step", "0.05", "--tol", "1e-9")
    assert code == 2 and not json.loads(out)["result"]["pass"]


def test_energy_examples(capsys):
    code, out = run(capsys, "energy", "--alpha", "0", "--n", "5", "--regulator", "constant", "--steps", "200", "--walkers", "8")
    res = json.loads(out)["result"]
    assert code == 0 and res["mean"] == 5.0 and res["std_error"] == 0.0
    code, out = run(capsys, "energy", "--alpha", "1/2", "--n", "2", "--oracle-state", "--steps", "400", "--walkers", "16")
    res = json.loads(out)["result"]
    assert code == 0 and abs(res["mean"] - 2.5) <= 2 * max(res["std_error"], 1e-12) + 1e-9
    code, out = run(capsys, "energy", "--alpha", "2/3", "--n", "6", "--regulator", "phi-r0", "--r0", "1.3", "--steps", "600", "--walkers", "16")
    res = json.loads(out)["result"]
    assert code == 0 and res["cs_bound"]["pass"] and res["cs_bound"]["threshold"] == 10.0


def test_energy_blocks_csv(capsys, tmp_path):
    path = tmp_path / "blocks.csv"
    code, _ = run(capsys, "energy", "--alpha", "1/2", "--n", "2", "--oracle-state", "--steps", "200", "--walkers", "4", "--blocks-csv", str(path))
    rows = list(csv.reader(open(path)))
    assert code == 0 and rows[0] == ["block", "mean_energy"] and len(rows) > 2


def test_invalid_config_exit_code(capsys):
    assert main(["energy", "--alpha", "2/3", "--n", "4"]) == 3
    assert main(["energy", "--alpha", "1/2", "--n", "3", "--oracle-state"]) == 3
    assert main(["fractionality", "--alpha", "2/x"]) == 3
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense"])
    assert exc.value.code == 3
    assert main(["scan", "--grid", "3:1:0.5"]) == 3


def test_config_echo_round_trip(capsys, tmp_path):
    code, out = run(capsys, "bounds", "--alpha", "2/3", "--n", "6", "--L", "-6", "--format", "csv")
    cfg = read_config_echo(out)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.as_dict()))
    code, again = run(capsys, "bounds", "--config", str(path))
    assert read_config_echo(again).as_dict() == cfg.as_dict()
    assert again == out
    js = run(capsys, "fractionality", "--alpha", "2/3")[1]
    assert RunConfig.from_dict(read_config_echo(js).as_dict()).as_dict() == read_config_echo(js).as_dict()


def test_flags_override_config_file(capsys, tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"subcommand": "bounds", "alpha": "1/3", "n": 3}))
    out = run(capsys, "bounds", "--config", str(path), "--n", "9")[1]
    cfg = read_config_echo(out)
    assert cfg.alpha == "1/3" and cfg.n == 9
    path.write_text(json.dumps({"subcommand": "bounds", "bogus": 1}))
    assert main(["bounds", "--config", str(path)]) == 3


def test_deterministic_output_is_byte_identical(capsys, tmp_path):
    argv = ["energy", "--alpha", "2/3", "--n", "3", "--steps", "300", "--walkers", "8", "--seed", "9", "--deterministic", "--threads", "4"]
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    assert a == b and "elapsed_seconds" not in a
    out = tmp_path / "o.json"
    assert main(argv + ["--out", str(out)]) == 0
    first = out.read_bytes()
    assert main(argv + ["--out", str(out)]) == 0
    assert out.read_bytes() == first


def test_scan(capsys):
    argv = ["scan", "--alpha", "2/3", "--n", "3", "--grid", "0.5:1.5:0.5", "--steps", "150", "--walkers", "8", "--chains", "2", "--format", "csv"]
    code, a = run(capsys, *argv)
    b = run(capsys, *argv)[1]
    rows = _csv_rows(a)
    assert code == 0 and a == b and [float(r["r0"]) for r in rows] == [0.5, 1.0, 1.5]
    assert "# argmin:" in a and "# golden_bracket:" in a


def test_parse_grid():
    assert parse_grid("0.5:3.0:0.5") == [0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
    with pytest.raises(ValueError):
        parse_grid("1:2")


def test_map_small(capsys):
    code, out = run(capsys, "map", "--alpha", "2/3", "--n", "3", "--fixed", "1,0;-1,1", "--window", "2", "--resolution", "21", "--format", "csv")
    rows = _csv_rows(out)
    assert code == 0 and len(rows) == 21 * 21
    dead = [r for r in rows if r["log_abs2_psi"] == "-inf"]
    assert len(dead) == 2 and all(r["arg_psi"] == "" for r in dead)
    assert "# zero_sites: 2" in out


def test_map_bosons_have_zero_phase(capsys):
    code, out = run(capsys, "map", "--alpha", "0", "--n", "3", "--fixed", "1,0;-1,1", "--window", "2", "--resolution", "11", "--format", "csv")
    assert all(float(r["arg_psi"]) == 0.0 for r in _csv_rows(out))


def test_map_requires_positions(capsys):
    assert main(["map", "--alpha", "2/3", "--n", "3"]) == 3
