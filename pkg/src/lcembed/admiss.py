"""Admissibility of control operators for diagonal semigroups.

A system with eigenvalues ``lambda_k`` (``Re lambda_k < 0``) and control
coefficients ``b_k`` is admissible for the weighted input space exactly when
``mu = sum |b_k|^2 delta_{-lambda_k}`` satisfies the Carleson square condition
of the matching Zen space on squares of side at least 1.

Systems are finitely many modes plus, optionally, a geometric tail
``lambda_{K+j} = lambda_K q**j``, ``b_{K+j} = b_K rho**j`` whose contribution
is analysed in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cohn import CriterionReport
from .errors import InputError
from .measure import CarlesonSquare, PositiveMeasure, square_mass
from .zen import ZenBase, as_zen_base, finite_time_embedding_test, product_square_mass

# materialised tail modes stop once |lambda| passes this
_TAIL_REACH = 1e15
_TAIL_MAX_MODES = 200


@dataclass(frozen=True)
class GeometricTail:
    """Modes ``j = 0, 1, ...``: ``lambda_0 q**j`` with coefficients ``b_0 rho**j``."""

    lambda0: complex
    b0: complex
    q: float
    rho: complex

    def __post_init__(self):
        if not complex(self.lambda0).real < 0:
            raise InputError("tail.lambda0: eigenvalue must lie in the open left half-plane")
        if not (self.q > 1 and math.isfinite(self.q)):
            raise InputError("tail.q: eigenvalue ratio must exceed 1")

    @property
    def mass_ratio(self) -> float:
        return abs(complex(self.rho)) ** 2

    def modes(self, reach: float = _TAIL_REACH, cap: int = _TAIL_MAX_MODES):
        lam, b = [], []
        l0, b0 = complex(self.lambda0), complex(self.b0)
        for j in range(cap):
            lj = l0 * self.q ** j
            if abs(lj) > reach and j > 0:
                break
            lam.append(lj)
            b.append(b0 * complex(self.rho) ** j)
        return lam, b

    def to_dict(self):
        l0, b0, r = complex(self.lambda0), complex(self.b0), complex(self.rho)
        return {"lambda0": {"re": l0.real, "im": l0.imag}, "b0": {"re": b0.real, "im": b0.imag},
                "q": self.q, "rho": {"re": r.real, "im": r.imag}}


@dataclass(frozen=True)
class DiagonalSystem:
    eigenvalues: tuple
    b: tuple
    weight: object = "hardy"
    T: float = 1.0
    tail: GeometricTail | None = None

    def __post_init__(self):
        lam = tuple(complex(v) for v in self.eigenvalues)
        b = tuple(complex(v) for v in self.b)
        if len(lam) != len(b):
            raise InputError(f"modes: {len(lam)} eigenvalues but {len(b)} control coefficients")
        for k, v in enumerate(lam):
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InputError(f"modes[{k}].lambda: must be finite")
            if not v.real < 0:
                raise InputError(f"modes[{k}].lambda: eigenvalue {v} must lie in the open left half-plane")
        for k, v in enumerate(b):
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InputError(f"modes[{k}].b: must be finite")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise InputError(f"T must be positive and finite, got {self.T}")
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "b", b)

    @property
    def base(self) -> ZenBase:
        return as_zen_base(self.weight)


def system_to_measure(sys: DiagonalSystem, tail_modes: bool = False) -> PositiveMeasure:
    """``sum |b_k|^2 delta_{-lambda_k}``, merging coincident eigenvalues.

    With ``tail_modes`` the geometric tail is materialised up to
    ``|lambda| <= 1e15``.
    """
    lam, b = list(sys.eigenvalues), list(sys.b)
    if tail_modes and sys.tail is not None:
        tl, tb = sys.tail.modes()
        lam += tl
        b += tb
    merged: dict[complex, float] = {}
    for lk, bk in zip(lam, b):
        s = -complex(lk)
        merged[s] = merged.get(s, 0.0) + abs(bk) ** 2
    atoms = list(merged.items())
    if all(s.imag == 0 for s, _ in atoms):
        return PositiveMeasure("axis", [(s.real, m) for s, m in atoms])
    return PositiveMeasure("half-plane", atoms)


@dataclass
class AdmissibilityResult:
    admissible: bool
    constant: float
    report: CriterionReport
    extras: dict = field(default_factory=dict)

    def __iter__(self):
        yield self.admissible
        yield self.constant
        yield self.report


def admissibility_test(sys: DiagonalSystem) -> AdmissibilityResult:
    """Square test on ``h >= 1`` for the system measure.

    Finite modes (plus the materialised tail) are searched exhaustively.  For
    a tail, masses grow by ``r = |rho|^2`` per mode while ``nu`` of the square
    that first swallows mode ``j`` grows by ``q**e``; ``r > q**e`` makes the
    ratio grow without bound, and ``r = q**e`` (with ``r > 1``) drives it to
    the limit ``m_j r / ((r - 1) C (kappa |s_j|)**e)``.
    """
    base = sys.base
    mu = system_to_measure(sys, tail_modes=True)
    emb = finite_time_embedding_test(mu, base, sys.T)
    checks = [
        {"name": "eigenvalues in open left half-plane", "status": "verified", "detail": ""},
        {"name": "doubling condition on zen base", "status": "verified", "detail": f"ratio {emb.delta2:g}"},
    ]
    constant = emb.constant_k
    witnesses = [q.to_dict() for q in emb.witnesses]
    extras: dict = {"modes": len(sys.eigenvalues), "exact_search": emb.sup.exact}
    admissible = emb.bounded
    if sys.tail is not None:
        tail = sys.tail
        asym = base.asymptotics()
        if asym is None:
            raise InputError("tail analysis needs a zen base with known growth")
        C, e = asym
        r = tail.mass_ratio
        growth = r / tail.q ** e
        extras["tail"] = {**tail.to_dict(), "mass_ratio": r, "nu_growth_exponent": e,
                          "ratio_growth_per_mode": growth,
                          "materialized_modes": len(tail.modes()[0])}
        s0 = -complex(tail.lambda0)
        # side needed per unit |s| for a square to hold a point on the ray of s0
        kappa = max(s0.real, 2.0 * abs(s0.imag)) / abs(s0)
        if growth > 1.0 + 1e-12:
            admissible = False
            constant = math.inf
            witnesses = _growth_witnesses(sys, mu, base)
            extras["tail"]["verdict"] = "ratio grows geometrically along the tail"
        elif r > 1.0 and abs(growth - 1.0) <= 1e-12:
            limit = abs(complex(tail.b0)) ** 2 * r / ((r - 1.0) * C * (kappa * abs(s0)) ** e)
            extras["tail"]["limit_ratio"] = limit
            constant = max(constant, limit)
        else:
            extras["tail"]["limit_ratio"] = 0.0
    verdict = "bounded" if admissible else "unbounded"
    report = CriterionReport("admissibility", constant, witnesses,
                             {"h_min": 1.0, "T": sys.T, "zen_base": base.name}, verdict, checks, extras)
    return AdmissibilityResult(admissible, constant, report, extras)


def _growth_witnesses(sys, mu, base, count: int = 6):
    """Squares ``Q_{0,h_j}`` swallowing successive tail modes, with their ratios."""
    tl, _ = sys.tail.modes()
    out = []
    for lam in tl[-count:]:
        s = -complex(lam)
        h = max(s.real, 2.0 * abs(s.imag), 1.0)
        q = CarlesonSquare(0.0, h)
        ratio = square_mass(mu, q) / product_square_mass(base, q)
        out.append({**q.to_dict(), "ratio": ratio})
    return out


def dyadic_ratios(sys: DiagonalSystem, ms: Sequence[int]):
    """``mu(Q_{0,2^m}) / nu(Q_{0,2^m})`` for the listed ``m`` (brute-force check)."""
    mu = system_to_measure(sys, tail_modes=True)
    base = sys.base
    return [square_mass(mu, CarlesonSquare(0.0, 2.0 ** m)) / product_square_mass(base, CarlesonSquare(0.0, 2.0 ** m))
            for m in ms]
