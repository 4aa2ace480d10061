import json
import os
import subprocess
import sys

import numpy as np
import pytest

from dkglab import cli
from dkglab.errors import BlowUpError
from dkglab.grid import load_field


def write(tmp_path, doc, name="m.json", indent=1):
    p = tmp_path / name
    p.write_text(json.dumps(doc, indent=indent) if isinstance(doc, dict) else doc)
    return str(p)


def sim(**params):
    base = {"grid": {"n_x": 16}, "solver": {"dt": 0.01, "steps": 10}}
    base.update(params)
    return {"schema": 1, "command": "simulate", "seed": 1, "parameters": base}


def run(tmp_path, doc, *extra, sub="run"):
    out = tmp_path / "out"
    code = cli.main([sub, "--manifest", write(tmp_path, doc), "--out", str(out), *extra])
    return code, out


def series(out):
    lines = (out / "series.csv").read_text().splitlines()
    header = lines[1].split(",")
    return lines[0], header, np.array([[float(v) for v in ln.split(",")] for ln in lines[2:]])


def test_zero_data_gives_zero_series(tmp_path):
    code, out = run(tmp_path, sim(data={"family": "zero"}))
    assert code == cli.EXIT_OK
    first, header, rows = series(out)
    assert header[:2] == ["t", "charge"]
    assert rows.shape[0] == 11 and np.all(rows[:, 1:] == 0)


def test_free_flow_charge_is_constant(tmp_path):
    code, out = run(tmp_path, sim(physics={"M": 0.0, "coupling": 0.0}, data={"family": "gaussian", "amplitude": 1.0}))
    assert code == 0
    _, _, rows = series(out)
    assert np.ptp(rows[:, 1]) <= 1e-12


def test_outputs_embed_hash_and_seed(tmp_path):
    doc = sim(data={"family": "gaussian"})
    code, out = run(tmp_path, doc, "--seed", "77")
    digest = cli.manifest_hash(doc)
    report = json.loads((out / "report.json").read_text())
    assert report["meta"] == {"manifest_sha256": digest, "seed": 77, "command": "simulate", "schema": 1}
    assert series(out)[0] == f"# manifest_sha256={digest} seed=77"
    index = json.loads((out / "fields" / "index.json").read_text())
    assert index["meta"]["manifest_sha256"] == digest and index["meta"]["seed"] == 77
    assert set(index["files"]) == {"psi.dkgf", "phi.dkgf", "dtphi.dkgf"}
    psi = load_field(out / "fields" / "psi.dkgf")
    assert psi.values.shape == (2, 11, 16, 16)


def test_seed_changes_random_data(tmp_path):
    doc = sim(data={"family": "random_spectrum"})
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    _, a = run(tmp_path / "a", doc, "--seed", "1")
    _, b = run(tmp_path / "b", doc, "--seed", "2")
    assert (a / "series.csv").read_text().splitlines()[2:] != (b / "series.csv").read_text().splitlines()[2:]


def test_blow_up_exit_code(tmp_path, monkeypatch):
    def explode(*args, **kwargs):
        raise BlowUpError(0.25)

    monkeypatch.setattr(cli, "evolve", explode)
    code, out = run(tmp_path, sim(data={"family": "gaussian"}))
    assert code == cli.EXIT_BLOWUP
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "blow-up" and report["blowup_time"] == 0.25


def test_real_blow_up(tmp_path):
    doc = sim(physics={"M": 1.0, "m": 1.0}, data={"family": "gaussian", "amplitude": 50.0},
              solver={"dt": 0.05, "steps": 2000})
    assert run(tmp_path, doc)[0] == cli.EXIT_BLOWUP


def test_picard_mode(tmp_path):
    doc = sim(solver={"mode": "picard", "T_local": 0.1, "n_t": 16}, data={"family": "gaussian", "amplitude": 0.1})
    code, out = run(tmp_path, doc)
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["picard"]["converged"]


def test_invalid_json_is_line_anchored(tmp_path, capsys):
    text = '{\n  "schema": 1,\n  "command": "simulate"\n  "parameters": {}\n}\n'
    assert cli.main(["run", "--manifest", write(tmp_path, text)]) == cli.EXIT_USAGE
    err = capsys.readouterr().err
    assert ":4:" in err and "invalid JSON" in err


def test_schema_error_points_at_the_key_line(tmp_path, capsys):
    doc = sim()
    doc["parameters"]["solver"]["dt"] = "fast"
    path = write(tmp_path, doc)
    assert cli.main(["run", "--manifest", path]) == cli.EXIT_USAGE
    err = capsys.readouterr().err
    lineno = next(i for i, ln in enumerate(open(path), 1) if '"dt"' in ln)
    assert f"m.json:{lineno}:" in err and "parameters.solver.dt" in err


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("schema"),
    lambda d: d.update(schema=2),
    lambda d: d.update(command="plot"),
    lambda d: d["parameters"].update(colour="red"),
])
def test_schema_violations_exit_1(tmp_path, mutate):
    doc = sim()
    mutate(doc)
    assert run(tmp_path, doc)[0] == cli.EXIT_USAGE


def test_verify_unknown_check_and_zero_count(tmp_path, capsys):
    doc = {"schema": 1, "command": "verify", "parameters": {"check": "angle99"}}
    assert run(tmp_path, doc)[0] == cli.EXIT_USAGE
    doc = {"schema": 1, "command": "verify", "parameters": {"check": "angle14", "sampling": {"count": 0}}}
    assert run(tmp_path, doc)[0] == cli.EXIT_USAGE
    assert "count" in capsys.readouterr().err


def test_verify_inadmissible_bilinear_names_constraint(tmp_path, capsys):
    doc = {"schema": 1, "command": "verify",
           "parameters": {"check": "bilinear11", "s": 0.6, "l": 1.0, "r": 1.01, "b": 1.0}}
    assert run(tmp_path, doc)[0] == cli.EXIT_USAGE
    assert "l ≤ 1/2 + 3/(4r)" in capsys.readouterr().err


def test_verify_override_runs_exploratory_and_fails_trend(tmp_path):
    doc = {"schema": 1, "command": "verify",
           "parameters": {"check": "bilinear11", "s": 0.6, "l": 1.0, "r": 1.01, "b": 1.0,
                          "resolutions": [8], "sampling": {"count": 2}}}
    code, out = run(tmp_path, doc, "--override-hypotheses")
    assert code == cli.EXIT_FAILED
    rep = json.loads((out / "report.json").read_text())["report"]
    assert rep["parameters"]["override"] is True


def test_verify_cone_passes_with_reference_weights(tmp_path):
    doc = {"schema": 1, "command": "verify", "parameters": {"check": "cone", "branch": "difference", "r": 1.01}}
    code, out = run(tmp_path, doc)
    assert code == cli.EXIT_OK
    assert (out / "series.csv").read_text().startswith("# manifest_sha256=")


def test_verify_failed_check_exits_3(tmp_path):
    # a tolerance far below the fit's accuracy must fail
    doc = {"schema": 1, "command": "verify",
           "parameters": {"check": "cone", "branch": "difference", "r": 1.01, "tolerance": 1e-6}}
    assert run(tmp_path, doc)[0] == cli.EXIT_FAILED


@pytest.mark.parametrize("check,extra", [
    ("angle14", {"sampling": {"count": 5000}}),
    ("angle15", {"sampling": {"count": 5000}}),
    ("angle16", {"sampling": {"count": 5000}}),
    ("nullform13", {"grid": {"n_x": 8, "n_t": 8}, "sampling": {"count": 1}}),
    ("bilinear12", {"resolutions": [8], "sampling": {"count": 1}}),
    ("product", {"alphas": [0.8, 0.8], "betas": [0.8, 0.8], "resolutions": [8], "sampling": {"count": 1}}),
    ("transfer", {"modes": [[1, 2], [3, 0]]}),
])
def test_every_check_runs(tmp_path, check, extra):
    doc = {"schema": 1, "command": "verify", "parameters": {"check": check, **extra}}
    code, out = run(tmp_path, doc)
    assert code == cli.EXIT_OK
    assert json.loads((out / "report.json").read_text())["meta"]["command"] == "verify"


def test_norms_command(tmp_path, capsys):
    doc = {"schema": 1, "command": "norms",
           "parameters": {"grid": {"n_x": 16}, "data": {"family": "single_mode", "mode": [1, 0], "amplitude": 1.0},
                          "norms": [{"label": "l2", "field": "phi", "s": 0.0, "r": 2.0}]}}
    code, out = run(tmp_path, doc)
    assert code == 0
    rec = json.loads((out / "report.json").read_text())["norms"][0]
    # cos(x) on [0, 2 pi)^2 has continuum coefficients 2 pi^2 at xi = +-e1
    assert np.isclose(rec["value"], 2 * np.pi ** 2 * np.sqrt(2))


def test_norms_from_field_file(tmp_path):
    code, out = run(tmp_path, sim(data={"family": "gaussian"}))
    doc = {"schema": 1, "command": "norms",
           "parameters": {"field_file": str(out / "fields" / "psi.dkgf"),
                          "norms": [{"field": "file", "s": 0.0, "r": 2.0, "b": 0.6, "branch": "plus"}]}}
    (tmp_path / "n").mkdir()
    code, out2 = run(tmp_path / "n", doc)
    assert code == 0
    assert json.loads((out2 / "report.json").read_text())["norms"][0]["value"] > 0


def test_region_command(tmp_path, capsys):
    assert cli.main(["region", "--r", "2", "--variant", "minimal_l", "--out", str(tmp_path)]) == 0
    line = capsys.readouterr().out
    assert line.startswith("(0+δ, 0.25+δ)") and "r=2 region: inside" in line
    assert cli.main(["region", "--r", "1.0001", "--variant", "minimal_s", "--delta", "0.001",
                     "--out", str(tmp_path)]) == 0
    s0 = float(capsys.readouterr().out[1:].split("+δ")[0])
    assert abs(s0 - 0.625) < 1e-3
    report = json.loads((tmp_path / "report.json").read_text())["region"]
    num, den = map(int, report["s0"].split("/"))
    assert abs(num / den - s0) < 1e-6
    assert cli.main(["region", "--r", "3", "--out", str(tmp_path)]) == cli.EXIT_USAGE


def test_scaling_command(tmp_path):
    doc = {"schema": 1, "command": "scaling", "parameters": {"s": 0.0, "r": 2.0}}
    assert run(tmp_path, doc)[0] == 0


def test_subcommand_must_match_manifest(tmp_path):
    assert run(tmp_path, sim(), sub="verify")[0] == cli.EXIT_USAGE
    assert run(tmp_path, sim(), sub="simulate")[0] == cli.EXIT_OK


def test_module_entry_point_and_usage_errors(tmp_path):
    doc = {"schema": 1, "command": "region", "parameters": {"r": 2, "delta": 0.01, "variant": "minimal_s"}}
    path = write(tmp_path, doc)
    proc = subprocess.run([sys.executable, "-m", "dkglab", "run", "--manifest", path, "--out", str(tmp_path / "o")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("(-0.2+δ, 0.35+δ)")
    proc = subprocess.run([sys.executable, "-m", "dkglab", "run"], capture_output=True, text=True)
    assert proc.returncode != 0
    proc = subprocess.run([sys.executable, "-m", "dkglab", "run", "--manifest", path, "--seed", "-1"],
                          capture_output=True, text=True)
    assert proc.returncode != 0


def test_numpy_backend_flag():
    code = "import dkglab; print(dkglab.backend())"
    env = dict(os.environ, DKGLAB_DISABLE_NUMBA="1")
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    assert proc.stdout.strip() == "numpy"
