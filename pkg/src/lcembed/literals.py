"""JSON literals for measures, inner functions, zen bases and systems.

Parsing errors are :class:`InputError` with the offending field path in the
message, e.g. ``measure.atoms[1].mass: must be a finite nonnegative number``.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import InputError
from .measure import DensityPiece, PlanarPiece, PositiveMeasure, PowerPiece, VerticalPiece

_INF_STRINGS = {"inf", "+inf", "infinity", "+infinity"}


def _num(v, where: str, *, allow_inf: bool = False) -> float:
    if isinstance(v, str) and allow_inf and v.strip().lower() in _INF_STRINGS:
        return math.inf
    if v is None and allow_inf:
        return math.inf
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputError(f"{where}: expected a number, got {v!r}")
    v = float(v)
    if math.isnan(v) or (math.isinf(v) and not allow_inf):
        raise InputError(f"{where}: must be finite, got {v}")
    return v


def _obj(v, where: str) -> dict:
    if not isinstance(v, dict):
        raise InputError(f"{where}: expected an object, got {type(v).__name__}")
    return v


def _list(v, where: str) -> list:
    if v is None:
        return []
    if not isinstance(v, list):
        raise InputError(f"{where}: expected a list, got {type(v).__name__}")
    return v


def _unknown(d: dict, allowed, where: str):
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise InputError(f"{where}: unknown field(s) {extra}")


def parse_point(v, where: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(_num(v, where))
    d = _obj(v, where)
    _unknown(d, {"re", "im"}, where)
    if "re" not in d:
        raise InputError(f"{where}.re: missing")
    return complex(_num(d["re"], f"{where}.re"), _num(d.get("im", 0.0), f"{where}.im"))


def _tabulated(table, where: str, x0: float, x1: float):
    d = _obj(table, where)
    _unknown(d, {"x", "y"}, where)
    xs = np.asarray([_num(v, f"{where}.x[{i}]") for i, v in enumerate(_list(d.get("x"), f"{where}.x"))])
    ys = np.asarray([_num(v, f"{where}.y[{i}]") for i, v in enumerate(_list(d.get("y"), f"{where}.y"))])
    if xs.size < 2 or xs.size != ys.size:
        raise InputError(f"{where}: need matching x and y tables with at least two entries")
    if np.any(np.diff(xs) <= 0):
        raise InputError(f"{where}.x: must be strictly increasing")
    if np.any(ys < 0):
        raise InputError(f"{where}.y: density values must be nonnegative")
    if xs[0] > x0 or (math.isfinite(x1) and xs[-1] < x1) or math.isinf(x1):
        raise InputError(f"{where}: table must cover the finite piece interval [{x0}, {x1})")
    # shape-preserving cubic: stays nonnegative between nonnegative samples
    interp = PchipInterpolator(xs, ys, extrapolate=False)

    def f(x, interp=interp):
        return np.nan_to_num(interp(x))

    return f


def parse_radial_pieces(items, where: str):
    out = []
    for i, raw in enumerate(_list(items, where)):
        w = f"{where}[{i}]"
        d = _obj(raw, w)
        _unknown(d, {"from", "to", "power", "tabulated"}, w)
        x0 = _num(d.get("from", 0.0), f"{w}.from")
        x1 = _num(d.get("to", math.inf), f"{w}.to", allow_inf=True)
        if ("power" in d) == ("tabulated" in d):
            raise InputError(f"{w}: give exactly one of 'power' or 'tabulated'")
        try:
            if "power" in d:
                p = _obj(d["power"], f"{w}.power")
                _unknown(p, {"c", "beta"}, f"{w}.power")
                c = _num(p.get("c", 1.0), f"{w}.power.c")
                if c < 0:
                    raise InputError(f"{w}.power.c: density coefficient must be nonnegative, got {c}")
                out.append(PowerPiece(x0, x1, c, _num(p.get("beta", 0.0), f"{w}.power.beta")))
            else:
                out.append(DensityPiece(x0, x1, _tabulated(d["tabulated"], f"{w}.tabulated", x0, x1),
                                        "tabulated"))
        except InputError as exc:
            msg = str(exc)
            raise InputError(msg if msg.startswith(w) else f"{w}: {msg}") from None
    return out


def _parse_planar(items, where):
    out = []
    for i, raw in enumerate(_list(items, where)):
        w = f"{where}[{i}]"
        d = _obj(raw, w)
        _unknown(d, {"x0", "x1", "y0", "y1", "power", "c"}, w)
        p = _obj(d.get("power", {"c": d.get("c", 1.0), "beta": 0.0}), f"{w}.power")
        c = _num(p.get("c", 1.0), f"{w}.power.c")
        if c < 0:
            raise InputError(f"{w}.power.c: density coefficient must be nonnegative, got {c}")
        try:
            out.append(PlanarPiece(_num(d.get("x0"), f"{w}.x0"),
                                   _num(d.get("x1"), f"{w}.x1", allow_inf=True),
                                   _num(d.get("y0"), f"{w}.y0"), _num(d.get("y1"), f"{w}.y1"),
                                   c, _num(p.get("beta", 0.0), f"{w}.power.beta")))
        except InputError as exc:
            raise InputError(f"{w}: {exc}") from None
    return out


def _parse_vertical(items, where):
    out = []
    for i, raw in enumerate(_list(items, where)):
        w = f"{where}[{i}]"
        d = _obj(raw, w)
        _unknown(d, {"x", "y0", "y1", "c"}, w)
        c = _num(d.get("c", 1.0), f"{w}.c")
        if c < 0:
            raise InputError(f"{w}.c: density must be nonnegative, got {c}")
        try:
            out.append(VerticalPiece(_num(d.get("x", 0.0), f"{w}.x"), _num(d.get("y0"), f"{w}.y0"),
                                     _num(d.get("y1"), f"{w}.y1"), c))
        except InputError as exc:
            raise InputError(f"{w}: {exc}") from None
    return out


def parse_measure(v, where: str = "measure") -> PositiveMeasure:
    d = _obj(v, where)
    _unknown(d, {"domain", "atoms", "radial", "planar", "vertical"}, where)
    domain = d.get("domain", "half-plane")
    if domain not in ("half-plane", "disc", "axis"):
        raise InputError(f"{where}.domain: expected 'half-plane', 'disc' or 'axis', got {domain!r}")
    atoms = []
    for i, raw in enumerate(_list(d.get("atoms"), f"{where}.atoms")):
        w = f"{where}.atoms[{i}]"
        a = _obj(raw, w)
        _unknown(a, {"re", "im", "mass"}, w)
        m = _num(a.get("mass"), f"{w}.mass")
        if m < 0:
            raise InputError(f"{w}.mass: must be a finite nonnegative number, got {m}")
        atoms.append((complex(_num(a.get("re"), f"{w}.re"), _num(a.get("im", 0.0), f"{w}.im")), m))
    radial = parse_radial_pieces(d.get("radial"), f"{where}.radial")
    planar = _parse_planar(d.get("planar"), f"{where}.planar")
    vertical = _parse_vertical(d.get("vertical"), f"{where}.vertical")
    if domain == "axis":
        atoms = [(s.real, m) if s.imag == 0 else (s, m) for s, m in atoms]
    try:
        return PositiveMeasure(domain, atoms, radial, planar, vertical)
    except InputError as exc:
        raise InputError(f"{where}.{exc}" if str(exc).startswith("atoms[") else f"{where}: {exc}") from None


def measure_to_dict(mu: PositiveMeasure) -> dict:
    out: dict[str, Any] = {"domain": mu.domain, "atoms": [
        {"re": s.real, "im": s.imag, "mass": m} for s, m in mu.atoms]}
    radial = []
    for p in mu.radial:
        if isinstance(p, PowerPiece):
            radial.append({"from": p.x0, "to": p.x1, "power": {"c": p.c, "beta": p.beta}})
        else:
            radial.append({"from": p.x0, "to": p.x1, "tabulated": p.label})
    out["radial"] = radial
    if mu.planar:
        out["planar"] = [{"x0": p.x0, "x1": p.x1, "y0": p.y0, "y1": p.y1,
                          "power": {"c": p.c, "beta": p.beta}} for p in mu.planar]
    if mu.vertical:
        out["vertical"] = [{"x": p.x, "y0": p.y0, "y1": p.y1, "c": p.c} for p in mu.vertical]
    return out


def parse_inner(v, where: str = "inner"):
    from .inner import InnerFunction

    d = _obj(v, where)
    _unknown(d, {"domain", "blaschke_zeros", "singular_T"}, where)
    zeros = []
    for i, raw in enumerate(_list(d.get("blaschke_zeros"), f"{where}.blaschke_zeros")):
        w = f"{where}.blaschke_zeros[{i}]"
        z = _obj(raw, w)
        _unknown(z, {"re", "im", "mult"}, w)
        mult = z.get("mult", 1)
        if isinstance(mult, bool) or not isinstance(mult, int) or mult < 1:
            raise InputError(f"{w}.mult: must be a positive integer, got {mult!r}")
        zeros += [complex(_num(z.get("re"), f"{w}.re"), _num(z.get("im", 0.0), f"{w}.im"))] * mult
    T = _num(d.get("singular_T", 0.0), f"{where}.singular_T")
    try:
        return InnerFunction(zeros, T, d.get("domain", "half-plane"))
    except InputError as exc:
        raise InputError(f"{where}.{exc}" if str(exc).startswith("blaschke") else f"{where}: {exc}") from None


def parse_zen_base(v, where: str = "zen_base"):
    from .zen import ZenBase

    if isinstance(v, str):
        try:
            return ZenBase.preset(v)
        except InputError as exc:
            raise InputError(f"{where}: {exc}") from None
    d = _obj(v, where)
    if "preset" in d:
        _unknown(d, {"preset"}, where)
        return parse_zen_base(d["preset"], f"{where}.preset")
    _unknown(d, {"atom_at_zero", "radial"}, where)
    m0 = _num(d.get("atom_at_zero", 0.0), f"{where}.atom_at_zero")
    if m0 < 0:
        raise InputError(f"{where}.atom_at_zero: must be nonnegative, got {m0}")
    pieces = parse_radial_pieces(d.get("radial"), f"{where}.radial")
    try:
        return ZenBase(m0, tuple(pieces))
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from None


def parse_system(v, where: str = "system"):
    from .admiss import DiagonalSystem, GeometricTail

    d = _obj(v, where)
    _unknown(d, {"modes", "weight", "T", "tail"}, where)
    lam, b = [], []
    for i, raw in enumerate(_list(d.get("modes"), f"{where}.modes")):
        w = f"{where}.modes[{i}]"
        m = _obj(raw, w)
        _unknown(m, {"lambda", "b"}, w)
        if "lambda" not in m or "b" not in m:
            raise InputError(f"{w}: needs both 'lambda' and 'b'")
        lam.append(parse_point(m["lambda"], f"{w}.lambda"))
        b.append(parse_point(m["b"], f"{w}.b"))
    weight = parse_zen_base(d.get("weight", "hardy"), f"{where}.weight")
    T = _num(d.get("T", 1.0), f"{where}.T")
    tail = None
    if d.get("tail") is not None:
        w = f"{where}.tail"
        t = _obj(d["tail"], w)
        _unknown(t, {"lambda0", "b0", "q", "rho"}, w)
        tail = GeometricTail(parse_point(t.get("lambda0"), f"{w}.lambda0"), parse_point(t.get("b0"), f"{w}.b0"),
                             _num(t.get("q"), f"{w}.q"), parse_point(t.get("rho"), f"{w}.rho"))
    return DiagonalSystem(tuple(lam), tuple(b), weight, T, tail)
