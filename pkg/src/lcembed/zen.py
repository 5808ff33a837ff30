"""Zen-space base measures, their weights and the finite-horizon embedding test.

A Zen space is built from a measure ``nu = nu_base (x) Lebesgue`` on the
closed right half-plane, where ``nu_base`` lives on ``[0, inf)`` and charges
every neighbourhood of the origin.  The Laplace transform is an isometry from
``L^2(0, inf; w(t) dt)`` onto the Zen space, with

    w(t) = 2 pi * integral of exp(-2 r t) d nu_base(r).

The factor ``2 pi`` is kept inside ``w`` throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import DivergenceError, HypothesisViolation, InputError
from .measure import (
    CarlesonSquare,
    CarlesonSupResult,
    DensityPiece,
    PositiveMeasure,
    PowerPiece,
    carleson_sup,
    integrate_kernel,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ZenBase:
    """Base measure ``atom_at_zero * delta_0 + sum(radial)`` on ``[0, inf)``."""

    atom_at_zero: float = 0.0
    radial: tuple = ()
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "radial", tuple(self.radial))
        if not (self.atom_at_zero >= 0 and math.isfinite(self.atom_at_zero)):
            raise InputError(f"atom_at_zero must be finite and nonnegative, got {self.atom_at_zero}")
        for p in self.radial:
            if not isinstance(p, (PowerPiece, DensityPiece)):
                raise InputError("zen base pieces must be radial pieces")
            if p.x0 < 0:
                raise InputError("zen base pieces must lie on [0, inf)")
        if self.atom_at_zero == 0 and not any(p.x0 == 0 for p in self.radial):
            raise InputError("zen base must charge every neighbourhood of 0 (atom at 0 or a piece starting at 0)")

    # presets ----------------------------------------------------------------

    @classmethod
    def hardy(cls):
        return cls(1.0, (), "hardy")

    @classmethod
    def bergman(cls):
        return cls(0.0, (PowerPiece(0.0, math.inf, 1.0, 0.0),), "bergman")

    @classmethod
    def power(cls, alpha: float):
        """Base ``r**(2 alpha - 1) dr`` whose weight is proportional to ``t**(-2 alpha)``.

        ``alpha = 0`` is the Hardy case.
        """
        if alpha < 0 or not math.isfinite(alpha):
            raise InputError(f"power preset needs alpha >= 0, got {alpha}")
        if alpha == 0:
            return cls(1.0, (), "power:0")
        return cls(0.0, (PowerPiece(0.0, math.inf, 1.0, 2.0 * alpha - 1.0),), f"power:{alpha:g}")

    @classmethod
    def preset(cls, name: str):
        if name == "hardy":
            return cls.hardy()
        if name == "bergman":
            return cls.bergman()
        if name.startswith("power:"):
            try:
                alpha = float(name.split(":", 1)[1])
            except ValueError:
                raise InputError(f"bad power preset {name!r}") from None
            return cls.power(alpha)
        raise InputError(f"unknown zen preset {name!r} (expected hardy, bergman or power:<alpha>)")

    # measure-theoretic queries ---------------------------------------------

    def mass(self, t: float) -> float:
        """``nu_base[0, t]`` (the atom at 0 is always included)."""
        return self.atom_at_zero + sum(p.mass(0.0, t) for p in self.radial)

    def as_measure(self) -> PositiveMeasure:
        atoms = [(0.0, self.atom_at_zero)] if self.atom_at_zero > 0 else []
        return PositiveMeasure("axis", atoms, self.radial)

    def asymptotics(self) -> tuple[float, float] | None:
        """``(C, e)`` with ``nu(Q_{a,h}) ~ C h**e`` as ``h -> inf``; ``None`` if unknown."""
        lead_e, lead_c = 0.0, 0.0
        finite_mass = self.atom_at_zero
        for p in self.radial:
            if math.isinf(p.x1):
                if isinstance(p, DensityPiece):
                    return None
                if p.c == 0:
                    continue
                e = p.exponent
                if e > lead_e + 1e-12:
                    lead_e, lead_c = e, p.c / e
                elif abs(e - lead_e) <= 1e-12 and e > 0:
                    lead_c += p.c / e
                elif e <= 0:
                    finite_mass += p.mass()
            else:
                finite_mass += p.mass()
        if lead_e > 0:
            return lead_c, 1.0 + lead_e
        return finite_mass, 1.0

    def growth_exponent(self) -> float | None:
        a = self.asymptotics()
        return None if a is None else a[1]

    def to_dict(self):
        out = {"atom_at_zero": self.atom_at_zero, "radial": []}
        for p in self.radial:
            if isinstance(p, PowerPiece):
                out["radial"].append({"from": p.x0, "to": p.x1, "power": {"c": p.c, "beta": p.beta}})
            else:
                out["radial"].append({"from": p.x0, "to": p.x1, "tabulated": p.label})
        if self.name != "custom":
            out["preset"] = self.name
        return out


@dataclass(frozen=True)
class ZenWeight:
    """The weight ``w(t)``, with a tag when a closed form was recognised."""

    evaluator: Callable = field(repr=False)
    closed_form: str = "numeric"
    params: dict = field(default_factory=dict)

    def __call__(self, t):
        return self.evaluator(t)


def _power_laplace(p: PowerPiece, t):
    """``integral over [x0, x1) of c r**beta exp(-2 r t) dr`` for ``beta > -1``."""
    a = p.beta + 1.0
    u = 2.0 * np.asarray(t, dtype=float)
    hi = 1.0 if math.isinf(p.x1) else special.gammainc(a, u * p.x1)
    lo = 0.0 if p.x0 == 0.0 else special.gammainc(a, u * p.x0)
    return p.c * special.gamma(a) * (hi - lo) / u ** a


def weight_from_base(base: ZenBase) -> ZenWeight:
    """Weight ``w(t) = 2 pi int exp(-2 r t) d nu_base(r)``.

    Closed forms: Hardy (``2 pi``), Bergman (``pi / t``), a single power law
    ``c r**beta`` on ``[0, inf)`` (``2 pi c Gamma(beta+1) / (2t)**(beta+1)``);
    anything else is assembled piecewise, with incomplete gamma functions for
    power pieces and adaptive quadrature for user densities.
    """
    m0 = base.atom_at_zero
    pieces = base.radial
    if not pieces:
        return ZenWeight(lambda t: np.full(np.shape(t), TWO_PI * m0) if np.ndim(t) else TWO_PI * m0,
                         "hardy" if m0 == 1.0 else "atom", {"mass": m0})
    if m0 == 0 and len(pieces) == 1 and isinstance(pieces[0], PowerPiece) \
            and pieces[0].x0 == 0 and math.isinf(pieces[0].x1):
        p = pieces[0]
        k = p.beta + 1.0
        const = TWO_PI * p.c * math.gamma(k) / 2.0 ** k
        if p.beta == 0 and p.c == 1:
            return ZenWeight(lambda t: math.pi / np.asarray(t, dtype=float) if np.ndim(t) else math.pi / t,
                             "bergman")
        return ZenWeight(lambda t: const * np.asarray(t, dtype=float) ** (-k), "power",
                         {"c": p.c, "beta": p.beta, "alpha": k / 2.0})

    def w(t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.full(t_arr.shape, m0)
        for p in pieces:
            if isinstance(p, PowerPiece) and p.beta > -1.0:
                out = out + _power_laplace(p, t_arr)
            else:
                sub = PositiveMeasure("axis", radial=[p])
                out = out + np.array([integrate_kernel(sub, lambda s, tt=tt: np.exp(-2.0 * s.real * tt))[0]
                                      for tt in t_arr])
        out = TWO_PI * out
        if not np.all(np.isfinite(out)):
            raise DivergenceError("weight integral diverges", float(np.nanmax(out)))
        return out if np.ndim(t) else float(out[0])

    return ZenWeight(w, "numeric")


def delta2_ratio(base: ZenBase, t_min: float = 1e-6, t_max: float = 1e6,
                 per_decade: int = 200, max_ratio: float = 1e6) -> tuple[float, bool]:
    """Doubling ratio ``sup_t nu[0, 2t) / nu[0, t)`` and whether it is acceptable.

    Exact for a lone atom at 0 (ratio 1) and a single power law from 0 to
    infinity (ratio ``2**(beta+1)``); otherwise the supremum over a geometric
    grid.  ``satisfied`` means finite and at most ``max_ratio``.
    """
    pieces = [p for p in base.radial if not (isinstance(p, PowerPiece) and p.c == 0)]
    if not pieces and base.atom_at_zero > 0:
        return 1.0, True
    if base.atom_at_zero == 0 and len(pieces) == 1 and isinstance(pieces[0], PowerPiece) \
            and pieces[0].x0 == 0 and math.isinf(pieces[0].x1):
        r = 2.0 ** pieces[0].exponent
        return r, r <= max_ratio
    n = int(round(math.log10(t_max / t_min) * per_decade)) + 1
    ts = np.geomspace(t_min, t_max, n)
    num = np.array([base.mass(2 * t) for t in ts])
    den = np.array([base.mass(t) for t in ts])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = num / den
    if not np.all(np.isfinite(ratios)):
        return math.inf, False
    r = float(ratios.max())
    return r, r <= max_ratio


def product_square_mass(base: ZenBase, q: CarlesonSquare) -> float:
    """``nu(Q_{a,h}) = nu_base[0, h] * h``."""
    if not isinstance(q, CarlesonSquare):
        q = CarlesonSquare(*q)
    return base.mass(q.h) * q.h


@dataclass(frozen=True)
class EmbeddingReport:
    """Verdict of the finite-horizon Laplace-Carleson embedding test."""

    bounded: bool
    constant_k: float
    witnesses: tuple
    T: float
    sup: CarlesonSupResult
    delta2: float
    base: str

    def to_dict(self):
        return {
            "bounded": self.bounded,
            "constant_k": self.constant_k,
            "certified_lower_bound": self.sup.certified_lower_bound,
            "exact": self.sup.exact,
            "growth_exponent": self.sup.growth_exponent,
            "witnesses": [q.to_dict() for q in self.witnesses],
            "h_min": 1.0,
            "T": self.T,
            "zen_base": self.base,
            "delta2_ratio": self.delta2,
            "weight_convention": "w(t) = 2*pi*int exp(-2rt) dnu(r); the lower bound "
                                 "w(t) >= nu[0,eps) exp(-2 eps t) used for the converse omits the 2*pi",
        }


def finite_time_embedding_test(mu: PositiveMeasure, base: ZenBase, T: float) -> EmbeddingReport:
    """Boundedness of ``L: L^2(0, T; w dt) -> L^2(mu)``.

    Bounded exactly when ``mu(Q) <= k nu(Q)`` for every Carleson square of
    side at least 1.  The verdict does not depend on ``T``; ``T`` is carried
    into the report only.
    """
    if not (T > 0 and math.isfinite(T)):
        raise InputError(f"horizon T must be positive and finite, got {T}")
    ratio, ok = delta2_ratio(base)
    if not ok:
        raise HypothesisViolation(f"zen base fails the doubling condition (ratio {ratio})")
    sup = carleson_sup(mu, lambda q: product_square_mass(base, q), 1.0, nu_growth=base.growth_exponent())
    return EmbeddingReport(sup.finite, sup.sup_estimate, sup.witnesses, T, sup, ratio, base.name)


def as_zen_base(desc) -> ZenBase:
    """Accept a preset name, a :class:`ZenBase`, or its JSON dictionary."""
    if isinstance(desc, ZenBase):
        return desc
    if isinstance(desc, str):
        return ZenBase.preset(desc)
    if isinstance(desc, dict):
        from .literals import parse_zen_base

        return parse_zen_base(desc)
    raise InputError(f"cannot interpret zen base {desc!r}")


def asymptotic_square_mass(base: ZenBase, hs: Sequence[float]):
    return np.array([base.mass(h) * h for h in hs])
