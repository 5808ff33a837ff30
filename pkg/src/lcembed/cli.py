"""Batch front end: ``lcembed run | validate | presets list``.

A job config is JSON::

    {"measure": {...} | {"file": "mu.json"},
     "inner": {...}, "zen_base": "hardy", "system": {...}, "T": 1.0,
     "analyses": ["widom", {"hankel-norm": {"T": 1, "n": 200}}, ...],
     "output": {"path": "report.json", "format": "json"}}

Exit codes: 0 success, 1 input error, 2 hypothesis violation.  The report is
a pure function of the config (no timestamps, fixed seeds), so reruns are
byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .errors import DivergenceError, HypothesisViolation, InputError, LCEmbedError
from .literals import _num, measure_to_dict, parse_inner, parse_measure, parse_system, parse_zen_base

SCHEMA_VERSION = "1.0"

EXIT_OK, EXIT_INPUT, EXIT_HYPOTHESIS = 0, 1, 2

# name -> (inputs it needs, argument after a colon: None / "number")
ANALYSES = {
    "embedding-test": ({"measure"}, None),
    "widom": ({"measure"}, None),
    "power-weight": ({"measure"}, "alpha"),
    "cohn-disc": ({"measure", "inner"}, None),
    "cohn-radial": ({"measure", "inner"}, None),
    "radial-halfplane": ({"measure", "inner"}, None),
    "paley-wiener": ({"measure"}, "T"),
    "sector": ({"measure", "inner"}, "half_angle"),
    "hankel-norm": ({"measure"}, None),
    "toeplitz-check": ({"measure"}, None),
    "trace": ({"measure"}, None),
    "model-hankel": ({"measure", "inner"}, None),
    "admissibility": ({"system"}, None),
}

_CONFIG_KEYS = {"measure", "inner", "zen_base", "system", "T", "analyses", "output"}


@dataclass
class AnalysisRequest:
    name: str
    params: dict


@dataclass
class JobConfig:
    raw: dict
    measure: object = None
    inner: object = None
    zen_base: object = None
    system: object = None
    T: float = 1.0
    analyses: list = field(default_factory=list)
    output: dict = field(default_factory=dict)

    @property
    def sha256(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
        return hashlib.sha256(canon.encode()).hexdigest()


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def _parse_analysis(entry, i) -> AnalysisRequest:
    where = f"analyses[{i}]"
    if isinstance(entry, str):
        name, _, arg = entry.partition(":")
        params = {}
        if name not in ANALYSES:
            raise InputError(f"{where}: unknown analysis {name!r}")
        argname = ANALYSES[name][1]
        if arg:
            if argname is None:
                raise InputError(f"{where}: analysis {name!r} takes no ':' argument")
            try:
                params[argname] = float(arg)
            except ValueError:
                raise InputError(f"{where}: cannot read {arg!r} as a number") from None
        elif argname is not None and name != "power-weight" and name != "paley-wiener":
            raise InputError(f"{where}: analysis {name!r} needs an argument, e.g. '{name}:0.5'")
        return AnalysisRequest(name, params)
    if isinstance(entry, dict):
        if "name" in entry:
            name = entry["name"]
            params = {k: v for k, v in entry.items() if k != "name"}
        elif len(entry) == 1:
            name, params = next(iter(entry.items()))
            if params is None:
                params = {}
            if not isinstance(params, dict):
                argname = ANALYSES.get(name, (None, None))[1]
                if argname is None:
                    raise InputError(f"{where}.{name}: expected an object of parameters")
                params = {argname: params}
        else:
            raise InputError(f"{where}: expected {{name: params}} or an object with a 'name' field")
        if not isinstance(name, str) or name not in ANALYSES:
            raise InputError(f"{where}: unknown analysis {name!r}")
        return AnalysisRequest(name, dict(params))
    raise InputError(f"{where}: expected a string or an object")


def parse_config(raw: dict, base_dir: Path | None = None) -> JobConfig:
    if not isinstance(raw, dict):
        raise InputError("config: expected a JSON object")
    extra = sorted(set(raw) - _CONFIG_KEYS)
    if extra:
        raise InputError(f"config: unknown field(s) {extra}")
    cfg = JobConfig(raw)
    if raw.get("measure") is not None:
        m = raw["measure"]
        if isinstance(m, dict) and set(m) == {"file"}:
            p = Path(m["file"])
            if base_dir is not None and not p.is_absolute():
                p = base_dir / p
            try:
                m = json.loads(p.read_text())
            except OSError as exc:
                raise InputError(f"measure.file: cannot read {p}: {exc.strerror}") from None
            except json.JSONDecodeError as exc:
                raise InputError(f"measure.file: {p} is not valid JSON ({exc.msg})") from None
            # the file contents are part of the job identity
            cfg.raw = {**raw, "measure": {"file": str(raw["measure"]["file"]), "contents": m}}
        cfg.measure = parse_measure(m)
    if raw.get("inner") is not None:
        cfg.inner = parse_inner(raw["inner"])
    cfg.zen_base = parse_zen_base(raw.get("zen_base", "hardy"))
    if raw.get("system") is not None:
        cfg.system = parse_system(raw["system"])
    cfg.T = _num(raw.get("T", 1.0), "T")
    if not cfg.T > 0:
        raise InputError(f"T: must be positive, got {cfg.T}")
    items = raw.get("analyses", [])
    if not isinstance(items, list):
        raise InputError("analyses: expected a list")
    cfg.analyses = [_parse_analysis(e, i) for i, e in enumerate(items)]
    for i, req in enumerate(cfg.analyses):
        missing = sorted(k for k in ANALYSES[req.name][0] if getattr(cfg, k) is None)
        if missing:
            raise InputError(f"analyses[{i}] ({req.name}): config lacks required input(s) {missing}")
    out = raw.get("output", {})
    if not isinstance(out, dict):
        raise InputError("output: expected an object")
    if out.get("format", "json") != "json":
        raise InputError(f"output.format: only 'json' is supported, got {out.get('format')!r}")
    cfg.output = out
    return cfg


def load_config(path) -> JobConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"config {path} is not valid JSON: {exc.msg} at line {exc.lineno}") from None
    return parse_config(raw, path.parent)


# ---------------------------------------------------------------------------
# analyses
# ---------------------------------------------------------------------------

def _p(params, key, default, kind=float):
    v = params.get(key, default)
    if kind is int:
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise InputError(f"{key}: expected a positive integer, got {v!r}")
        return v
    if kind is str:
        if not isinstance(v, str):
            raise InputError(f"{key}: expected a string, got {v!r}")
        return v
    return _num(v, key)


def _check_keys(params, allowed):
    extra = sorted(set(params) - set(allowed))
    if extra:
        raise InputError(f"unknown parameter(s) {extra}")


def _halfplane(cfg):
    from .inner import transfer_measure_disc_to_halfplane

    mu = cfg.measure
    return transfer_measure_disc_to_halfplane(mu) if mu.domain == "disc" else mu


def _disc(cfg):
    from .inner import transfer_measure_halfplane_to_disc

    mu = cfg.measure
    rho = mu if mu.domain == "disc" else transfer_measure_halfplane_to_disc(mu)
    phi = cfg.inner if cfg.inner.domain == "disc" else cfg.inner.to_disc()
    return rho, phi


def _ratio_dict(r):
    return {"constant": r.value, "argmax": r.argmax, "growth_exponent": r.growth_exponent,
            "divergence": r.divergence}


def _a_embedding(cfg, params):
    from .zen import finite_time_embedding_test

    _check_keys(params, {"T"})
    T = _p(params, "T", cfg.T)
    rep = finite_time_embedding_test(_halfplane(cfg), cfg.zen_base, T)
    return {**rep.to_dict(), "verdict": "bounded" if rep.bounded else "unbounded"}


def _a_widom(cfg, params):
    from .measure import widom_constant

    _check_keys(params, {"x_min"})
    x_min = _p(params, "x_min", 1.0)
    fin = widom_constant(cfg.measure, x_min)
    whole = widom_constant(cfg.measure, 0.0)
    return {"x_min": x_min, **_ratio_dict(fin), "verdict": "bounded" if math.isfinite(fin.value) else "unbounded",
            "half_line": {"x_min": 0.0, **_ratio_dict(whole)}}


def _a_power_weight(cfg, params):
    from .measure import power_weight_constant

    _check_keys(params, {"alpha", "x_min"})
    alpha = _p(params, "alpha", 0.0)
    x_min = _p(params, "x_min", 1.0)
    r = power_weight_constant(cfg.measure, alpha, x_min)
    return {"alpha": alpha, "x_min": x_min, "exponent": 1.0 + 2.0 * alpha, **_ratio_dict(r),
            "verdict": "bounded" if math.isfinite(r.value) else "unbounded"}


def _a_cohn_disc(cfg, params):
    from .cohn import cohn_test_disc

    _check_keys(params, set())
    return cohn_test_disc(*_disc(cfg)).to_dict()


def _a_cohn_radial(cfg, params):
    from .cohn import radial_test_disc

    _check_keys(params, set())
    return radial_test_disc(*_disc(cfg)).to_dict()


def _a_radial_halfplane(cfg, params):
    from .cohn import radial_test_halfplane

    _check_keys(params, set())
    theta = cfg.inner if cfg.inner.domain == "half-plane" else cfg.inner.to_halfplane()
    return radial_test_halfplane(_halfplane(cfg), theta).to_dict()


def _a_paley_wiener(cfg, params):
    from .cohn import paley_wiener_test

    _check_keys(params, {"T"})
    return paley_wiener_test(_halfplane(cfg), _p(params, "T", cfg.T)).to_dict()


def _a_sector(cfg, params):
    from .cohn import sector_test

    _check_keys(params, {"half_angle"})
    if "half_angle" not in params:
        raise InputError("half_angle: missing")
    theta = cfg.inner if cfg.inner.domain == "half-plane" else cfg.inner.to_halfplane()
    return sector_test(_halfplane(cfg), theta, _p(params, "half_angle", None)).to_dict()


def _as_list(v, key, kind):
    vals = v if isinstance(v, list) else [v]
    if not vals:
        raise InputError(f"{key}: empty sweep")
    return [_p({key: x}, key, None, kind) for x in vals]


def _a_hankel_norm(cfg, params, tables):
    from .operators import QuadratureGrid, convergence_table, discretize_hankel, operator_norm, symbol_from_measure

    _check_keys(params, {"T", "n", "grid", "gamma"})
    Ts = _as_list(params.get("T", cfg.T), "T", float)
    ns = _as_list(params.get("n", 200), "n", int)
    scheme = _p(params, "grid", "graded", str)
    gamma = _p(params, "gamma", 2.0)
    h = symbol_from_measure(_halfplane(cfg))
    T, n = Ts[0], ns[0]
    grid = QuadratureGrid.build(T, n, scheme, gamma=gamma)
    est = operator_norm(discretize_hankel(h, grid))
    fine = operator_norm(discretize_hankel(h, QuadratureGrid.build(T, 2 * grid.n, scheme, gamma=gamma)))
    change = abs(fine.norm - est.norm) / max(fine.norm, 1e-300)
    out = {
        "T": T, "n": grid.n, "grid": grid.describe(),
        "norm": est.norm, "norm_over_sqrt_T": est.norm / math.sqrt(T),
        "power_iteration": {"iterations": est.iterations, "converged": est.converged, "tol": 1e-8, "seed": 0},
        "refinement": {"n": 2 * grid.n, "norm": fine.norm, "relative_change": change},
        "verdict": "bounded-on-(0,T)" if math.isfinite(est.norm) and est.converged else "inconclusive",
    }
    if len(Ts) > 1 or len(ns) > 1:
        rows = convergence_table(h, Ts, ns, scheme, gamma=gamma)
        out["table"] = rows
        tables.append(rows)
    return out


def _a_toeplitz(cfg, params):
    from .operators import QuadratureGrid, discretize_hankel, symbol_from_measure, toeplitz_via_reversal

    _check_keys(params, {"T", "n"})
    T = _p(params, "T", cfg.T)
    n = _p(params, "n", 100, int)
    grid = QuadratureGrid.build(T, n, "symmetric-graded")
    h = symbol_from_measure(_halfplane(cfg))
    sh = np.linalg.svd(discretize_hankel(h, grid).matrix, compute_uv=False)
    st = np.linalg.svd(toeplitz_via_reversal(h, grid).matrix, compute_uv=False)
    diff = float(np.max(np.abs(sh - st)))
    return {"T": T, "n": grid.n, "grid": grid.describe(), "largest_singular_value": float(sh[0]),
            "max_singular_value_difference": diff, "tolerance": 1e-10,
            "verdict": "agree" if diff <= 1e-10 * max(1.0, float(sh[0])) else "disagree"}


def _a_trace(cfg, params):
    from .operators import QuadratureGrid, embedding_matrix, hs_and_trace_norms

    _check_keys(params, {"T", "n", "grid"})
    T = _p(params, "T", cfg.T)
    n = _p(params, "n", 200, int)
    grid = QuadratureGrid.build(T, n, _p(params, "grid", "graded", str))
    mu = _halfplane(cfg)
    op = embedding_matrix(mu, grid)
    rep = hs_and_trace_norms(op, mu=mu)
    d = rep.to_dict()
    ms = d["measure_side"]
    d["relative_discrepancy"] = abs(rep.trace - ms) / max(abs(ms), 1e-300)
    d["printed_display_flagged"] = not math.isclose(rep.printed_display, ms, rel_tol=1e-6)
    return {"T": T, "n": grid.n, "grid": grid.describe(), **d,
            "factorization_residual": op.meta.get("factorization_residual"),
            "atomization_change": op.meta.get("atomization_change")}


def _a_model_hankel(cfg, params):
    from .cohn import radial_test_halfplane
    from .operators import model_hankel_finite, operator_norm

    _check_keys(params, set())
    theta = cfg.inner if cfg.inner.domain == "half-plane" else cfg.inner.to_halfplane()
    mu = _halfplane(cfg)
    op = model_hankel_finite(mu, theta)
    est = operator_norm(op)
    out = {"matrix": op.matrix.tolist(), "norm": est.norm, **op.meta,
           "verdict": "bounded" if math.isfinite(est.norm) else "unbounded"}
    try:
        out["criterion"] = radial_test_halfplane(mu, theta).to_dict()
    except (InputError, HypothesisViolation) as exc:
        out["criterion"] = {"skipped": str(exc)}
    return out


def _a_admissibility(cfg, params):
    from .admiss import admissibility_test

    _check_keys(params, set())
    res = admissibility_test(cfg.system)
    return {"admissible": res.admissible, "constant": res.constant, **res.report.to_dict()}


_RUNNERS = {
    "embedding-test": _a_embedding, "widom": _a_widom, "power-weight": _a_power_weight,
    "cohn-disc": _a_cohn_disc, "cohn-radial": _a_cohn_radial, "radial-halfplane": _a_radial_halfplane,
    "paley-wiener": _a_paley_wiener, "sector": _a_sector, "toeplitz-check": _a_toeplitz,
    "trace": _a_trace, "model-hankel": _a_model_hankel, "admissibility": _a_admissibility,
}


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def to_jsonable(obj):
    """Plain JSON tree: non-finite floats become strings, complex -> {re, im}."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return str(obj)


def run_job(cfg: JobConfig):
    """Run every analysis; returns ``(report, exit_code, tables)``.

    Failures are isolated per analysis.  Exit code is 1 if any analysis hit an
    input error, else 2 if any hit a hypothesis violation, else 0.
    """
    entries, tables_out = [], []
    for i, req in enumerate(cfg.analyses):
        entry = {"index": i, "name": req.name, "params": req.params}
        tables: list = []
        try:
            if req.name == "hankel-norm":
                result = _a_hankel_norm(cfg, req.params, tables)
            else:
                result = _RUNNERS[req.name](cfg, req.params)
            entry["status"] = "ok"
            entry["result"] = result
        except HypothesisViolation as exc:
            entry["status"] = "hypothesis-violation"
            entry["error"] = {"type": "HypothesisViolation", "message": str(exc)}
        except DivergenceError as exc:
            entry["status"] = "diverged"
            entry["result"] = {"verdict": "unbounded", "constant": math.inf, "partial": exc.partial,
                               "message": str(exc)}
        except (InputError, LCEmbedError) as exc:
            entry["status"] = "input-error"
            entry["error"] = {"type": type(exc).__name__, "message": str(exc)}
        except Exception as exc:  # isolate anything unexpected too
            entry["status"] = "internal-error"
            entry["error"] = {"type": type(exc).__name__, "message": str(exc)}
        for rows in tables:
            tables_out.append((i, req.name, rows))
        entries.append(entry)
    statuses = {e["status"] for e in entries}
    if statuses & {"input-error", "internal-error"}:
        worst = EXIT_INPUT
    elif "hypothesis-violation" in statuses:
        worst = EXIT_HYPOTHESIS
    else:
        worst = EXIT_OK
    inputs = {
        "measure": measure_to_dict(cfg.measure) if cfg.measure is not None else None,
        "inner": cfg.inner.to_dict() if cfg.inner is not None else None,
        "zen_base": cfg.zen_base.to_dict(),
        "T": cfg.T,
    }
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "lcembed", "version": __version__},
        "config_sha256": cfg.sha256,
        "kernel_backend": _kernels.backend_name(),
        "status": {EXIT_OK: "ok", EXIT_INPUT: "input-error", EXIT_HYPOTHESIS: "hypothesis-violation"}[worst],
        "exit_code": worst,
        "inputs": inputs,
        "analyses": entries,
    }
    return to_jsonable(report), worst, tables_out


def dumps_report(report) -> str:
    return json.dumps(report, indent=2, allow_nan=False, ensure_ascii=True) + "\n"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report, code, tables = run_job(cfg)
    out = args.out or cfg.output.get("path")
    text = dumps_report(report)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv_dir and tables:
        from .operators import write_table_csv

        d = Path(args.csv_dir)
        d.mkdir(parents=True, exist_ok=True)
        for i, name, rows in tables:
            write_table_csv(rows, d / f"{i:02d}-{name}.csv")
    for e in report["analyses"]:
        if e["status"] not in ("ok", "diverged"):
            print(f"analyses[{e['index']}] {e['name']}: {e['status']}: {e['error']['message']}", file=sys.stderr)
    return code


def _cmd_validate(args) -> int:
    try:
        cfg = load_config(args.config)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"ok: {len(cfg.analyses)} analyses, config sha256 {cfg.sha256}")
    return EXIT_OK


def _cmd_presets(args) -> int:
    print("zen bases:")
    print("  hardy         atom at 0; weight 2*pi")
    print("  bergman       Lebesgue on [0, inf); weight pi/t")
    print("  power:<a>     r^(2a-1) dr; weight proportional to t^(-2a)")
    print("analyses:")
    for name, (needs, arg) in ANALYSES.items():
        suffix = f":<{arg}>" if arg else ""
        print(f"  {name + suffix:<22}needs {', '.join(sorted(needs))}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lcembed", description="Laplace-Carleson embedding analyses")
    ap.add_argument("--version", action="version", version=f"lcembed {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a job config and write a JSON report")
    r.add_argument("--config", required=True)
    r.add_argument("--out", help="report path (default: output.path from the config, else stdout)")
    r.add_argument("--csv-dir", help="directory for convergence tables")
    r.set_defaults(func=_cmd_run)
    v = sub.add_parser("validate", help="parse a config without running it")
    v.add_argument("--config", required=True)
    v.set_defaults(func=_cmd_validate)
    p = sub.add_parser("presets", help="list presets")
    p.add_argument("what", choices=["list"])
    p.set_defaults(func=_cmd_presets)
    return ap


def main(argv=None) -> int:
    threads = os.environ.get("LCEMBED_THREADS")
    if threads:
        try:
            _kernels.set_threads(int(threads))
        except ValueError:
            print(f"error: LCEMBED_THREADS must be an integer, got {threads!r}", file=sys.stderr)
            return EXIT_INPUT
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
