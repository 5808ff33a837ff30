import csv
import json
import os
import subprocess
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from lcembed.cli import dumps_report, load_config, main, parse_config, run_job
from lcembed.errors import InputError

EXAMPLES = Path(__file__).resolve().parents[1] / "docs" / "examples"
SCHEMA = json.loads(resources.files("lcembed").joinpath("schemas/report.schema.json").read_text())


def write(tmp_path, cfg, name="job.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return p


def run(tmp_path, cfg, *extra):
    out = tmp_path / "report.json"
    code = main(["run", "--config", str(write(tmp_path, cfg)), "--out", str(out), *extra])
    return code, (json.loads(out.read_text()) if out.exists() else None)


@pytest.mark.parametrize("path", sorted(EXAMPLES.glob("*.json")), ids=lambda p: p.stem)
def test_example_reports_match_schema(path, tmp_path):
    out = tmp_path / "r.json"
    main(["run", "--config", str(path), "--out", str(out)])
    jsonschema.validate(json.loads(out.read_text()), SCHEMA)


def test_inverse_sqrt_job(tmp_path):
    code, rep = run(tmp_path, json.loads((EXAMPLES / "inverse_sqrt.json").read_text()), "--csv-dir",
                    str(tmp_path / "tables"))
    assert code == 0 and rep["status"] == "ok"
    widom, hankel, toep = rep["analyses"]
    assert widom["result"]["constant"] == 2.0
    assert widom["result"]["half_line"]["constant"] == "inf"
    assert hankel["result"]["verdict"] == "bounded-on-(0,T)"
    assert toep["result"]["verdict"] == "agree"
    rows = list(csv.DictReader(open(tmp_path / "tables" / "01-hankel-norm.csv")))
    assert [float(r["T"]) for r in rows] == [1.0, 4.0, 16.0]
    scaled = [float(r["norm"]) / float(r["T"]) ** 0.5 for r in rows]
    assert max(scaled) / min(scaled) - 1 < 5e-3


def test_empty_analyses(tmp_path):
    code, rep = run(tmp_path, {"analyses": []})
    assert code == 0 and rep["analyses"] == []
    jsonschema.validate(rep, SCHEMA)


def test_negative_mass_is_input_error(tmp_path, capsys):
    code, rep = run(tmp_path, {"measure": {"atoms": [{"re": 1, "mass": -1}]}, "analyses": ["widom"]})
    assert code == 1 and rep is None
    assert "measure.atoms[0].mass" in capsys.readouterr().err


def test_hypothesis_violation_exit_code(tmp_path):
    code, rep = run(tmp_path, json.loads((EXAMPLES / "rank_one.json").read_text()))
    assert code == 2 and rep["status"] == "hypothesis-violation"
    statuses = [a["status"] for a in rep["analyses"]]
    assert statuses == ["ok", "ok", "ok", "hypothesis-violation"]


def test_input_error_outranks_violation(tmp_path):
    cfg = {"measure": {"atoms": [{"re": 0, "mass": 1}]}, "inner": {"blaschke_zeros": [{"re": 1}]},
           "analyses": ["cohn-disc", {"hankel-norm": {"n": -3}}]}
    code, rep = run(tmp_path, cfg)
    assert code == 1
    assert rep["analyses"][1]["status"] == "input-error"


def test_rank_one_trace_flags_display(tmp_path):
    _, rep = run(tmp_path, json.loads((EXAMPLES / "rank_one.json").read_text()))
    tr = rep["analyses"][0]["result"]
    assert abs(tr["trace"] - 0.4323323583816936) < 1e-8
    assert tr["printed_display_flagged"] is True


@pytest.mark.parametrize("cfg,msg", [
    ({"analyses": ["nope"]}, "analyses[0]: unknown analysis"),
    ({"analyses": ["widom"]}, "analyses[0]"),
    ({"measure": {}, "analyses": ["sector"]}, "analyses[0]"),
    ({"measure": {}, "analyses": ["widom:3"]}, "analyses[0]"),
    ({"bogus": 1}, "config: unknown field"),
    ({"measure": {}, "analyses": [], "output": {"format": "xml"}}, "output.format"),
    ({"T": -1}, "T:"),
])
def test_config_errors(cfg, msg):
    with pytest.raises(InputError) as exc:
        parse_config(cfg)
    assert msg in str(exc.value)


def test_analysis_forms_equivalent():
    a = parse_config({"measure": {}, "analyses": ["paley-wiener:3"]}).analyses[0]
    b = parse_config({"measure": {}, "analyses": [{"paley-wiener": 3}]}).analyses[0]
    c = parse_config({"measure": {}, "analyses": [{"name": "paley-wiener", "T": 3}]}).analyses[0]
    assert a.params["T"] == b.params["T"] == c.params["T"] == 3


def test_measure_file_reference(tmp_path):
    (tmp_path / "mu.json").write_text(json.dumps({"domain": "axis", "atoms": [{"re": 1, "mass": 3}]}))
    cfg = load_config(write(tmp_path, {"measure": {"file": "mu.json"}, "analyses": ["widom"]}))
    assert cfg.measure.atoms[0][1] == 3
    assert cfg.raw["measure"]["contents"]["atoms"][0]["mass"] == 3
    with pytest.raises(InputError, match="measure.file"):
        load_config(write(tmp_path, {"measure": {"file": "missing.json"}}))


def test_hash_changes_with_config():
    a = parse_config({"measure": {"atoms": [{"re": 1, "mass": 1}]}})
    b = parse_config({"measure": {"atoms": [{"re": 1, "mass": 2}]}})
    assert a.sha256 != b.sha256
    assert a.sha256 == parse_config({"measure": {"atoms": [{"mass": 1, "re": 1}]}}).sha256


def test_reports_byte_identical_in_process():
    for path in sorted(EXAMPLES.glob("*.json")):
        cfg = load_config(path)
        assert dumps_report(run_job(cfg)[0]) == dumps_report(run_job(load_config(path))[0])


def test_reports_byte_identical_across_processes(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        subprocess.run([sys.executable, "-m", "lcembed.cli", "run", "--config", str(EXAMPLES / "inverse_sqrt.json"),
                        "--out", str(out)], check=True)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_validate_and_presets(capsys):
    assert main(["validate", "--config", str(EXAMPLES / "rank_one.json")]) == 0
    assert "4 analyses" in capsys.readouterr().out
    assert main(["presets", "list"]) == 0
    out = capsys.readouterr().out
    assert "bergman" in out and "admissibility" in out


def test_stdout_when_no_out(tmp_path, capsys):
    assert main(["run", "--config", str(write(tmp_path, {"analyses": []}))]) == 0
    assert json.loads(capsys.readouterr().out)["exit_code"] == 0


def test_thread_env_rejects_garbage(monkeypatch, capsys):
    monkeypatch.setenv("LCEMBED_THREADS", "many")
    assert main(["presets", "list"]) == 1


def test_numpy_backend_report_matches(tmp_path):
    env = {**os.environ, "LCEMBED_DISABLE_NUMBA": "1"}
    out = tmp_path / "np.json"
    subprocess.run([sys.executable, "-m", "lcembed.cli", "run", "--config", str(EXAMPLES / "rank_one.json"),
                    "--out", str(out)], env=env)
    a = json.loads(out.read_text())
    b = run_job(load_config(EXAMPLES / "rank_one.json"))[0]
    assert a["kernel_backend"] == "numpy"
    a.pop("kernel_backend"), b.pop("kernel_backend")
    assert json.loads(dumps_report(a)) == json.loads(dumps_report(b))
