"""Positive measures on the closed right half-plane, the half-line and the disc.

A :class:`PositiveMeasure` is a finite sum of

* atoms (location, mass),
* radial pieces: densities on an interval of the real axis, either a power
  law ``c * x**beta`` (:class:`PowerPiece`, integrated in closed form) or a
  user supplied smooth function (:class:`DensityPiece`),
* planar pieces: densities on an axis-parallel rectangle
  (:class:`PlanarPiece`),
* vertical pieces: line densities on a vertical segment ``Re s = x``
  (:class:`VerticalPiece`); the Hardy-space measure ``delta_0 x Lebesgue`` is
  the prototype.

Carleson squares ``Q_{a,h}`` are closed, including the boundary segment
``Re s = 0``; interval masses ``mu[0, x]`` include an atom at the origin.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate, optimize

from . import _kernels
from .errors import DivergenceError, InputError

DOMAINS = ("half-plane", "disc", "axis")

# relative slack used for closed-set membership tests
_SLACK = 1e-12
_QUAD_LIMIT = 500


def _close_le(a, b, scale=1.0):
    return a <= b + _SLACK * max(1.0, abs(scale))


# ---------------------------------------------------------------------------
# pieces
# ---------------------------------------------------------------------------

def _power_integral(a: float, b: float, beta: float) -> float:
    """Integral of ``x**beta`` over ``[a, b]``; ``b`` may be infinite."""
    if b <= a:
        return 0.0
    if beta == 0.0:
        return b - a
    if beta == -1.0:
        return math.log(b / a)
    p = beta + 1.0
    if math.isinf(b):
        return math.inf if p > 0 else -(a ** p) / p
    lo = 0.0 if a == 0.0 else a ** p
    return (b ** p - lo) / p


@dataclass(frozen=True)
class PowerPiece:
    """Density ``c * x**beta`` on ``[x0, x1)`` of the real axis."""

    x0: float
    x1: float = math.inf
    c: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        for name in ("x0", "c", "beta"):
            if not math.isfinite(getattr(self, name)):
                raise InputError(f"power piece: {name} must be finite")
        if not self.x1 > self.x0:
            raise InputError(f"power piece: empty interval [{self.x0}, {self.x1})")
        if self.c < 0:
            raise InputError(f"power piece: negative density coefficient c={self.c}")
        if self.beta <= -1.0 and self.x0 <= 0.0:
            raise InputError("power piece: beta <= -1 needs x0 > 0 (local integrability)")
        if self.x0 < 0.0 and self.beta != 0.0:
            raise InputError("power piece: negative abscissae only allowed for constant densities")

    def density(self, x):
        return self.c * np.power(x, self.beta) if self.beta != 0.0 else self.c * np.ones_like(x)

    def mass(self, lo: float = -math.inf, hi: float = math.inf) -> float:
        a, b = max(lo, self.x0), min(hi, self.x1)
        if b <= a or self.c == 0.0:
            return 0.0
        return self.c * _power_integral(a, b, self.beta)

    @property
    def exponent(self) -> float:
        """Growth exponent ``beta + 1`` of the cumulative mass."""
        return self.beta + 1.0


@dataclass(frozen=True)
class DensityPiece:
    """Smooth user density ``func(x)`` on ``[x0, x1)`` of the real axis."""

    x0: float
    x1: float
    func: Callable[[float], float]
    label: str = "tabulated"

    def __post_init__(self):
        if not self.x1 > self.x0:
            raise InputError(f"density piece: empty interval [{self.x0}, {self.x1})")

    def density(self, x):
        return self.func(x)

    def mass(self, lo: float = -math.inf, hi: float = math.inf) -> float:
        a, b = max(lo, self.x0), min(hi, self.x1)
        if b <= a:
            return 0.0
        val, _ = _quad_real(self.func, a, b)
        return val


@dataclass(frozen=True)
class PlanarPiece:
    """Density on the rectangle ``[x0, x1] x [y0, y1]``.

    Without ``func`` the density is ``c * (Re s)**beta`` and masses are exact.
    """

    x0: float
    x1: float
    y0: float
    y1: float
    c: float = 1.0
    beta: float = 0.0
    func: Callable[[float, float], float] | None = None

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise InputError("planar piece: empty rectangle")
        if self.c < 0:
            raise InputError(f"planar piece: negative density coefficient c={self.c}")
        if self.x0 < 0:
            raise InputError("planar piece: rectangle leaves the closed half-plane")
        if self.func is None and self.beta <= -1.0 and self.x0 <= 0.0:
            raise InputError("planar piece: beta <= -1 needs x0 > 0")

    def density(self, x, y):
        if self.func is not None:
            return self.func(x, y)
        return self.c * np.power(x, self.beta)

    def mass(self, xa, xb, ya, yb) -> tuple[float, float]:
        a, b = max(xa, self.x0), min(xb, self.x1)
        c, d = max(ya, self.y0), min(yb, self.y1)
        if b <= a or d <= c:
            return 0.0, 0.0
        if self.func is None:
            return self.c * _power_integral(a, b, self.beta) * (d - c), 0.0
        f = self.func
        val, err = integrate.dblquad(lambda y, x: f(x, y), a, b, c, d, epsrel=1e-8, epsabs=1e-14)
        return val, err


@dataclass(frozen=True)
class VerticalPiece:
    """Line density ``c`` (w.r.t. arc length) on ``{x} x [y0, y1]``."""

    x: float
    y0: float
    y1: float
    c: float = 1.0

    def __post_init__(self):
        if self.x < 0:
            raise InputError("vertical piece: line leaves the closed half-plane")
        if not self.y1 > self.y0:
            raise InputError("vertical piece: empty segment")
        if self.c < 0:
            raise InputError(f"vertical piece: negative density c={self.c}")

    def mass(self, xa, xb, ya, yb) -> float:
        if not (xa <= self.x <= xb):
            return 0.0
        c, d = max(ya, self.y0), min(yb, self.y1)
        return self.c * (d - c) if d > c else 0.0


RadialPiece = PowerPiece | DensityPiece


# ---------------------------------------------------------------------------
# the measure
# ---------------------------------------------------------------------------

class PositiveMeasure:
    """Immutable positive measure; see the module docstring for the pieces."""

    __slots__ = ("domain", "locations", "masses", "radial", "planar", "vertical")

    def __init__(
        self,
        domain: str = "half-plane",
        atoms: Sequence[tuple[complex, float]] = (),
        radial: Sequence[RadialPiece] = (),
        planar: Sequence[PlanarPiece] = (),
        vertical: Sequence[VerticalPiece] = (),
    ):
        if domain not in DOMAINS:
            raise InputError(f"domain must be one of {DOMAINS}, got {domain!r}")
        locs = np.array([complex(a[0]) for a in atoms], dtype=np.complex128)
        masses = np.array([float(a[1]) for a in atoms], dtype=np.float64)
        if masses.size and (not np.all(np.isfinite(masses)) or np.any(masses < 0)):
            bad = int(np.flatnonzero(~(masses >= 0) | ~np.isfinite(masses))[0])
            raise InputError(f"atoms[{bad}].mass: must be a finite nonnegative number, got {masses[bad]}")
        if locs.size and not np.all(np.isfinite(locs)):
            raise InputError("atom locations must be finite")
        radial, planar, vertical = tuple(radial), tuple(planar), tuple(vertical)
        for p in radial:
            if not isinstance(p, (PowerPiece, DensityPiece)):
                raise InputError(f"radial piece of unsupported type {type(p).__name__}")
        _check_support(domain, locs, radial, planar, vertical)
        locs.flags.writeable = False
        masses.flags.writeable = False
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "radial", radial)
        object.__setattr__(self, "planar", planar)
        object.__setattr__(self, "vertical", vertical)

    def __setattr__(self, name, value):
        raise AttributeError("PositiveMeasure is immutable")

    def __repr__(self):
        return (
            f"PositiveMeasure(domain={self.domain!r}, atoms={len(self.masses)}, "
            f"radial={len(self.radial)}, planar={len(self.planar)}, vertical={len(self.vertical)})"
        )

    # constructors -----------------------------------------------------------

    @classmethod
    def from_atoms(cls, locations, masses, domain="half-plane"):
        return cls(domain, atoms=list(zip(np.atleast_1d(locations), np.atleast_1d(masses))))

    @classmethod
    def zero(cls, domain="half-plane"):
        return cls(domain)

    @classmethod
    def power_law(cls, c=1.0, beta=0.0, x0=0.0, x1=math.inf, domain="axis"):
        return cls(domain, radial=[PowerPiece(x0, x1, c, beta)])

    @classmethod
    def lebesgue_axis(cls, x0=0.0, x1=math.inf, domain="axis"):
        return cls.power_law(1.0, 0.0, x0, x1, domain)

    # queries ----------------------------------------------------------------

    @property
    def atoms(self):
        return list(zip(self.locations.tolist(), self.masses.tolist()))

    @property
    def is_atomic(self) -> bool:
        return not (self.radial or self.planar or self.vertical)

    @property
    def is_zero(self) -> bool:
        return (
            not np.any(self.masses > 0)
            and all(getattr(p, "c", 1.0) == 0.0 for p in self.radial + self.planar + self.vertical)
            and not any(isinstance(p, DensityPiece) for p in self.radial)
        )

    @property
    def on_real_axis(self) -> bool:
        return not self.planar and not self.vertical and bool(np.all(self.locations.imag == 0.0))

    def total_mass(self) -> float:
        tot = float(self.masses.sum())
        for p in self.radial:
            tot += p.mass()
        for p in self.planar:
            tot += p.mass(-math.inf, math.inf, -math.inf, math.inf)[0]
        for p in self.vertical:
            tot += p.c * (p.y1 - p.y0)
        return tot

    def scaled(self, factor: float) -> "PositiveMeasure":
        if factor < 0:
            raise InputError("cannot scale a positive measure by a negative factor")
        radial = []
        for p in self.radial:
            if isinstance(p, PowerPiece):
                radial.append(PowerPiece(p.x0, p.x1, p.c * factor, p.beta))
            else:
                f = p.func
                radial.append(DensityPiece(p.x0, p.x1, lambda x, f=f: factor * f(x), p.label))
        planar = []
        for p in self.planar:
            f = p.func
            planar.append(PlanarPiece(p.x0, p.x1, p.y0, p.y1, p.c * factor, p.beta,
                                      None if f is None else (lambda x, y, f=f: factor * f(x, y))))
        vertical = [VerticalPiece(p.x, p.y0, p.y1, p.c * factor) for p in self.vertical]
        return PositiveMeasure(self.domain, list(zip(self.locations, self.masses * factor)),
                               radial, planar, vertical)

    def __add__(self, other: "PositiveMeasure") -> "PositiveMeasure":
        if not isinstance(other, PositiveMeasure):
            return NotImplemented
        if other.domain != self.domain:
            raise InputError(f"cannot add measures on {self.domain!r} and {other.domain!r}")
        return PositiveMeasure(
            self.domain,
            self.atoms + other.atoms,
            self.radial + other.radial,
            self.planar + other.planar,
            self.vertical + other.vertical,
        )


def _check_support(domain, locs, radial, planar, vertical):
    if domain == "disc":
        if locs.size and np.any(np.abs(locs) > 1.0 + _SLACK):
            raise InputError("disc measure: atom outside the closed unit disc")
        for p in radial:
            if p.x0 < -1.0 or p.x1 > 1.0:
                raise InputError("disc measure: radial piece must lie in [-1, 1]")
        if planar or vertical:
            raise InputError("disc measure: only atoms and radial pieces are supported")
        return
    if locs.size and np.any(locs.real < 0):
        i = int(np.flatnonzero(locs.real < 0)[0])
        raise InputError(f"atoms[{i}].re: support point {locs[i]} lies outside the closed half-plane")
    for p in radial:
        if p.x0 < 0:
            raise InputError("radial piece must lie on [0, inf)")
    if domain == "axis":
        if locs.size and np.any(locs.imag != 0):
            raise InputError("axis measure: atoms must be real")
        if planar or vertical:
            raise InputError("axis measure: planar and vertical pieces are not allowed")


# ---------------------------------------------------------------------------
# Carleson squares and masses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CarlesonSquare:
    """Closed square ``{x + iy : 0 <= x <= h, |y - a| <= h/2}``."""

    a: float
    h: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.h)):
            raise InputError("Carleson square needs finite a and h")
        if self.h <= 0:
            raise InputError(f"Carleson square side must be positive, got h={self.h}")

    @property
    def bounds(self):
        return 0.0, self.h, self.a - self.h / 2, self.a + self.h / 2

    def contains(self, s) -> bool:
        s = complex(s)
        return (_close_le(0.0, s.real) and _close_le(s.real, self.h, self.h)
                and _close_le(abs(s.imag - self.a), self.h / 2, self.h + abs(self.a)))

    def to_dict(self):
        return {"a": self.a, "h": self.h}


def _rect_mass(mu: PositiveMeasure, xa, xb, ya, yb) -> tuple[float, float]:
    """Mass and quadrature error of the closed rectangle ``[xa,xb] x [ya,yb]``."""
    total = 0.0
    err = 0.0
    if mu.masses.size:
        loc = mu.locations
        sx = _SLACK * max(1.0, abs(xb))
        sy = _SLACK * max(1.0, abs(ya), abs(yb))
        inside = ((loc.real >= xa - sx) & (loc.real <= xb + sx)
                  & (loc.imag >= ya - sy) & (loc.imag <= yb + sy))
        total += float(mu.masses[inside].sum())
    if mu.radial and ya <= 0.0 <= yb:
        for p in mu.radial:
            total += p.mass(xa, xb)
    for p in mu.planar:
        v, e = p.mass(xa, xb, ya, yb)
        total += v
        err += e
    for p in mu.vertical:
        total += p.mass(xa, xb, ya, yb)
    return total, err


def square_mass(mu: PositiveMeasure, q: CarlesonSquare, *, with_error: bool = False):
    """``mu(Q)`` for the closed Carleson square ``q``.

    Exact for atoms, power-law and constant pieces; planar pieces with a user
    density use ``dblquad``, whose error estimate is returned when
    ``with_error`` is set.
    """
    if mu.domain == "disc":
        raise InputError("square_mass needs a half-plane or axis measure")
    if not isinstance(q, CarlesonSquare):
        q = CarlesonSquare(*q)
    val, err = _rect_mass(mu, *q.bounds)
    return (val, err) if with_error else val


def interval_mass(mu: PositiveMeasure, x: float) -> float:
    """``mu([0, x])`` for a measure carried by the half-line."""
    if mu.domain == "disc" or mu.planar or mu.vertical:
        raise InputError("interval_mass needs a measure on [0, inf) (no planar or vertical pieces)")
    if np.any(mu.locations.imag != 0):
        raise InputError("interval_mass needs a measure on [0, inf) (off-axis atoms present)")
    if not x >= 0:
        raise InputError(f"interval_mass needs x >= 0, got {x}")
    return _rect_mass(mu, 0.0, x, 0.0, 0.0)[0]


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def _quad_real(f, a, b, rtol=1e-8, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, a, b, epsrel=rtol, epsabs=1e-14, limit=_QUAD_LIMIT, **kw)
        except integrate.IntegrationWarning as exc:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                partial = integrate.quad(f, a, b, epsrel=rtol, epsabs=1e-14, limit=_QUAD_LIMIT, **kw)[0]
            raise DivergenceError(f"quadrature on [{a}, {b}] did not converge: {exc}", partial) from None
    if not math.isfinite(val):
        raise DivergenceError(f"quadrature on [{a}, {b}] returned {val}", val)
    return val, err


def _quad_complex(f, a, b, rtol=1e-8, **kw):
    """Adaptive quadrature of a complex integrand, real and imaginary parts separately."""
    probe = complex(f(0.5 * (a + b)) if math.isfinite(a + b) else f(a + 1.0 if math.isfinite(a) else b - 1.0))
    re, e1 = _quad_real(lambda x: complex(f(x)).real, a, b, rtol, **kw)
    if probe.imag == 0.0 and _probe_real(f, a, b):
        return re, e1
    im, e2 = _quad_real(lambda x: complex(f(x)).imag, a, b, rtol, **kw)
    return complex(re, im), e1 + e2


def _probe_real(f, a, b):
    lo = a if math.isfinite(a) else -1e3
    hi = b if math.isfinite(b) else lo + 1e3
    xs = np.linspace(lo, hi, 7)[1:-1]
    return all(complex(f(x)).imag == 0.0 for x in xs)


def integrate_kernel(mu: PositiveMeasure, kernel, rtol: float = 1e-8):
    """Integrate ``kernel`` (a function of a complex point) against ``mu``.

    Returns ``(value, error_estimate)``.  Atoms are summed exactly (the kernel
    is called once on the array of locations); densities go through adaptive
    Gauss-Kronrod quadrature.  Power-law pieces that start at the origin use
    the algebraic-weight rule so integrable endpoint singularities cost nothing
    extra.  Raises :class:`DivergenceError` (with the partial value) when the
    quadrature cannot reach the tolerance.
    """
    value = 0.0
    err = 0.0
    if mu.masses.size:
        kv = np.asarray(kernel(mu.locations))
        if not np.iscomplexobj(kv) or np.all(kv.imag == 0):
            kv = kv.real.astype(np.float64)
        value = value + np.sum(mu.masses * kv)
        if not np.all(np.isfinite(kv[mu.masses > 0])):
            raise DivergenceError("kernel is infinite at an atom", value)
    for p in mu.radial:
        v, e = _integrate_radial(p, kernel, rtol)
        value = value + v
        err += e
    for p in mu.vertical:
        v, e = _quad_complex(lambda y, p=p: p.c * kernel(complex(p.x, y)), p.y0, p.y1, rtol)
        value = value + v
        err += e
    for p in mu.planar:
        v, e = _integrate_planar(p, kernel, rtol)
        value = value + v
        err += e
    value = complex(value)
    if value.imag == 0.0:
        return value.real, err
    return value, err


def _integrate_radial(p, kernel, rtol):
    if isinstance(p, DensityPiece):
        return _quad_complex(lambda x: p.func(x) * kernel(complex(x, 0.0)), p.x0, p.x1, rtol)
    if p.c == 0.0:
        return 0.0, 0.0
    if p.x0 == 0.0 and p.beta != 0.0:
        # x**beta handled as an algebraic weight on [0, split]
        split = min(p.x1, 1.0)
        v, e = _quad_complex(lambda x: p.c * kernel(complex(x, 0.0)), 0.0, split, rtol,
                             weight="alg", wvar=(p.beta, 0.0))
        if split < p.x1:
            v2, e2 = _quad_complex(lambda x: p.c * x ** p.beta * kernel(complex(x, 0.0)), split, p.x1, rtol)
            v, e = v + v2, e + e2
        return v, e
    return _quad_complex(lambda x: p.c * x ** p.beta * kernel(complex(x, 0.0)), p.x0, p.x1, rtol)


def _integrate_planar(p, kernel, rtol):
    def inner(x, part):
        return _quad_real(lambda y: part(complex(p.density(x, y) * kernel(complex(x, y)))), p.y0, p.y1, rtol)[0]

    re, e1 = _quad_real(lambda x: inner(x, lambda z: z.real), p.x0, p.x1, rtol)
    im, e2 = _quad_real(lambda x: inner(x, lambda z: z.imag), p.x0, p.x1, rtol)
    return (complex(re, im) if im != 0.0 else re), e1 + e2


# ---------------------------------------------------------------------------
# growth exponents
# ---------------------------------------------------------------------------

def mass_growth_exponent(mu: PositiveMeasure) -> float | None:
    """Exponent ``e`` with ``sup_a mu(Q_{a,h}) ~ h**e`` as ``h -> inf``.

    ``None`` when a user density on an unbounded interval makes it unknown.
    Logarithmic growth is reported as ``0``.
    """
    e = 0.0
    for p in mu.radial:
        if math.isinf(p.x1):
            if isinstance(p, DensityPiece):
                return None
            if p.c > 0:
                e = max(e, p.exponent)
    for p in mu.planar:
        if math.isinf(p.x1) or math.isinf(p.y1) or math.isinf(p.y0):
            if p.func is not None:
                return None
            ex = p.beta + 1.0 if math.isinf(p.x1) else 0.0
            ey = 1.0 if (math.isinf(p.y1) or math.isinf(p.y0)) else 0.0
            if p.c > 0:
                e = max(e, ex + ey)
    for p in mu.vertical:
        if (math.isinf(p.y1) or math.isinf(p.y0)) and p.c > 0:
            e = max(e, 1.0)
    return e


# ---------------------------------------------------------------------------
# supremum over Carleson squares
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CarlesonSupResult:
    """Outcome of :func:`carleson_sup`.

    ``sup_estimate`` is infinite when some square has ``nu(Q) = 0 < mu(Q)`` or
    when ``mu`` outgrows ``nu`` as ``h -> inf``; ``growth_exponent`` then holds
    the excess exponent.  ``exact`` is set for the exhaustive atomic search.
    """

    sup_estimate: float
    witnesses: tuple[CarlesonSquare, ...]
    certified_lower_bound: float
    exact: bool
    evaluations: int
    growth_exponent: float | None = None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.sup_estimate)


def _atomic_sides(x, y, h_min):
    gaps = np.abs(y[:, None] - y[None, :])[np.triu_indices(len(y), 1)]
    cand = np.concatenate([x, gaps, [h_min]])
    cand = np.maximum(cand, h_min)
    cand = cand[cand > 0]
    return np.unique(cand)


def _top_witnesses(records, k=5):
    records.sort(key=lambda r: (-r[0], r[1].h, r[1].a))
    out = []
    seen = set()
    for _, q in records:
        key = (q.a, q.h)
        if key not in seen:
            seen.add(key)
            out.append(q)
        if len(out) == k:
            break
    return tuple(out)


def carleson_sup(
    mu: PositiveMeasure,
    nu_square_mass: Callable[[CarlesonSquare], float],
    h_min: float = 0.0,
    *,
    nu_growth: float | None = None,
    rtol: float = 1e-3,
    max_refinements: int = 5,
) -> CarlesonSupResult:
    """Supremum of ``mu(Q) / nu(Q)`` over Carleson squares with ``h >= h_min``.

    Purely atomic measures are searched exhaustively: the ratio of a step
    function to a side-only, nondecreasing ``nu`` peaks at the smallest square
    holding a given atom cluster, so sides are drawn from the atom abscissae
    and ordinate gaps (clipped to ``h_min``) and squares are aligned with an
    atom on their lower edge.  Anything with a density is searched on a
    multiscale grid refined dyadically until the maximum moves by less than
    ``rtol``; the result is then a certified lower bound, not a proof.

    ``nu_growth`` is the exponent of ``nu(Q_{a,h})`` as ``h -> inf``; when it
    is given and ``mu`` grows faster (see :func:`mass_growth_exponent`) the
    supremum is reported as infinite.
    """
    if mu.domain == "disc":
        raise InputError("carleson_sup needs a half-plane or axis measure")
    if h_min < 0 or not math.isfinite(h_min):
        raise InputError(f"h_min must be finite and nonnegative, got {h_min}")

    if nu_growth is not None:
        e_mu = mass_growth_exponent(mu)
        if e_mu is not None and e_mu > nu_growth + 1e-12:
            q = CarlesonSquare(0.0, max(h_min, 1.0) * 1e6)
            return CarlesonSupResult(math.inf, (q,), square_mass(mu, q) / nu_square_mass(q),
                                     False, 1, e_mu - nu_growth)

    if mu.is_atomic:
        return _carleson_sup_atomic(mu, nu_square_mass, h_min)
    return _carleson_sup_grid(mu, nu_square_mass, h_min, rtol, max_refinements)


def _carleson_sup_atomic(mu, nu, h_min):
    keep = mu.masses > 0
    x = mu.locations.real[keep]
    y = mu.locations.imag[keep]
    m = mu.masses[keep]
    if m.size == 0:
        q = CarlesonSquare(0.0, h_min if h_min > 0 else 1.0)
        return CarlesonSupResult(0.0, (q,), 0.0, True, 0)

    if h_min == 0.0 and np.any(x == 0.0):
        i = int(np.flatnonzero(x == 0.0)[0])
        q = CarlesonSquare(float(y[i]), 1e-300)
        if nu(q) <= 1e-280:
            return CarlesonSupResult(math.inf, (q,), math.inf, True, 1)

    sides = _atomic_sides(x, y, h_min)
    best, arg = _kernels.window_sums(x, y, m, sides)
    records = []
    for h, bm, i in zip(sides, best, arg):
        if i < 0:
            continue
        # centre the square on the captured cluster
        g = y - y[i]
        grab = (g >= 0) & (g <= h) & (x <= h)
        q = CarlesonSquare(float(0.5 * (y[grab].min() + y[grab].max())), float(h))
        nq = nu(q)
        if nq <= 0:
            return CarlesonSupResult(math.inf, (q,), math.inf, True, len(records) + 1)
        records.append((float(bm) / nq, q))
    top = max(r[0] for r in records)
    return CarlesonSupResult(top, _top_witnesses(records), top, True, len(records))


def _ordinate_features(mu):
    feats = list(np.unique(mu.locations.imag))
    for p in mu.planar:
        feats += [v for v in (p.y0, p.y1) if math.isfinite(v)]
    for p in mu.vertical:
        feats += [v for v in (p.y0, p.y1) if math.isfinite(v)]
    if mu.radial:
        feats.append(0.0)
    return np.unique(np.asarray(feats, dtype=float))


def _abscissa_scale(mu):
    xs = [1.0]
    xs += list(np.abs(mu.locations.real))
    for p in mu.radial:
        xs += [v for v in (p.x0, p.x1) if math.isfinite(v)]
    for p in mu.planar:
        xs += [v for v in (p.x0, p.x1, abs(p.y0), abs(p.y1)) if math.isfinite(v)]
    for p in mu.vertical:
        xs += [v for v in (p.x, abs(p.y0), abs(p.y1)) if math.isfinite(v)]
    return max(xs)


def _carleson_sup_grid(mu, nu, h_min, rtol, max_refinements):
    feats = _ordinate_features(mu)
    ylo, yhi = (float(feats.min()), float(feats.max())) if feats.size else (0.0, 0.0)
    h_lo = h_min if h_min > 0 else 1e-6
    h_hi = max(1e6, 16.0 * _abscissa_scale(mu), 4.0 * h_lo)
    x_at = mu.locations.real[mu.masses > 0]
    y_at = mu.locations.imag[mu.masses > 0]
    extra_sides = np.maximum(_atomic_sides(x_at, y_at, h_lo), h_lo) if x_at.size else np.array([h_lo])

    records = []
    evaluations = 0
    prev = None
    top = 0.0
    for level in range(max_refinements + 1):
        per_octave = 4 * 2 ** level
        n_oct = math.log2(h_hi / h_lo)
        sides = h_lo * 2.0 ** (np.arange(int(math.ceil(n_oct * per_octave)) + 1) / per_octave)
        sides = np.unique(np.concatenate([sides, extra_sides]))
        n_centres = 8 * 2 ** level
        for h in sides:
            cents = [feats + h / 2, feats - h / 2, feats]
            if yhi > ylo:
                cents.append(np.linspace(ylo - h / 2, yhi + h / 2, min(n_centres, 256)))
            for a in np.unique(np.concatenate(cents)) if feats.size else [0.0]:
                q = CarlesonSquare(float(a), float(h))
                mq = _rect_mass(mu, *q.bounds)[0]
                evaluations += 1
                if mq <= 0:
                    continue
                nq = nu(q)
                if nq <= 0:
                    return CarlesonSupResult(math.inf, (q,), math.inf, False, evaluations)
                records.append((mq / nq, q))
        top = max((r[0] for r in records), default=0.0)
        if prev is not None and (top - prev) <= rtol * max(top, 1e-300):
            break
        prev = top
    if not records:
        q = CarlesonSquare(0.0, h_lo)
        return CarlesonSupResult(0.0, (q,), 0.0, False, evaluations)
    return CarlesonSupResult(top, _top_witnesses(records), top, False, evaluations)


# ---------------------------------------------------------------------------
# Widom-type ratios on the half-line
# ---------------------------------------------------------------------------

class RatioSup(NamedTuple):
    """``sup_{x >= x_min} mu[0, x] / x**p`` with diagnostics.

    ``divergence`` is ``"infinity"`` or ``"zero"`` when the ratio is unbounded
    as ``x`` tends there; ``growth_exponent`` is then the exponent of the
    ratio in that limit.
    """

    value: float
    argmax: float
    growth_exponent: float | None = None
    divergence: str | None = None

    def __float__(self):
        return float(self.value)


def _axis_pieces(mu):
    if mu.domain == "disc" or mu.planar or mu.vertical or np.any(mu.locations.imag != 0):
        raise InputError("Widom-type constants need a measure carried by [0, inf)")
    return mu.radial


def _axis_ratio_sup(mu: PositiveMeasure, p: float, x_min: float) -> RatioSup:
    pieces = _axis_pieces(mu)
    if x_min < 0 or not math.isfinite(x_min):
        raise InputError(f"x_min must be finite and nonnegative, got {x_min}")
    F = lambda x: _rect_mass(mu, 0.0, x, 0.0, 0.0)[0]  # noqa: E731
    live = [q for q in pieces if not (isinstance(q, PowerPiece) and q.c == 0.0)]

    # behaviour at the ends
    lead = [q for q in live if math.isinf(q.x1)]
    limits = []
    for q in lead:
        if isinstance(q, DensityPiece):
            continue
        if q.exponent > p + 1e-12:
            return RatioSup(math.inf, math.inf, q.exponent - p, "infinity")
    top_lead = [q for q in lead if isinstance(q, PowerPiece) and abs(q.exponent - p) <= 1e-12]
    if top_lead:
        limits.append((sum(q.c / q.exponent for q in top_lead), math.inf))
    if any(isinstance(q, DensityPiece) for q in lead):
        xs = np.array([1e3, 1e6, 1e9]) * max(1.0, x_min)
        r = np.array([F(x) / x ** p for x in xs])
        if r[-1] > r[-2] * (1 + 1e-6) and r[-2] > r[-3]:
            slope = math.log(r[-1] / r[-2]) / math.log(xs[-1] / xs[-2])
            return RatioSup(math.inf, math.inf, slope, "infinity")

    if x_min == 0.0:
        m0 = float(mu.masses[mu.locations.real == 0.0].sum())
        if m0 > 0:
            return RatioSup(math.inf, 0.0, -p, "zero")
        for q in live:
            if q.x0 == 0.0 and isinstance(q, PowerPiece):
                if q.exponent < p - 1e-12:
                    return RatioSup(math.inf, 0.0, q.exponent - p, "zero")
                if abs(q.exponent - p) <= 1e-12:
                    limits.append((q.c / q.exponent, 0.0))

    # breakpoints and candidate abscissae
    bps = {x_min}
    bps.update(float(v) for v in mu.locations.real)
    for q in live:
        bps.update(v for v in (q.x0, q.x1) if math.isfinite(v))
    bps = sorted(b for b in bps if b >= x_min)
    cand = [b for b in bps if b > 0]
    segs = list(zip(bps, bps[1:] + [math.inf]))
    for lo, hi in segs:
        active = [q for q in live if q.x0 <= lo and q.x1 >= hi]
        if not active:
            continue
        if len(active) == 1 and isinstance(active[0], PowerPiece):
            q = active[0]
            ref = lo if lo > 0 else (hi if math.isfinite(hi) else 1.0) / 2
            b = q.exponent
            g = (lambda x: x ** b / b) if b != 0.0 else math.log
            K0 = F(ref) - q.c * g(ref)
            if b != 0.0:
                denom = q.c * (1.0 - p / b)
                if denom != 0.0:
                    xb = p * K0 / denom
                    if xb > 0:
                        cand.append(xb ** (1.0 / b))
            else:
                cand.append(math.exp((q.c - p * K0) / (p * q.c)))
        else:
            a = lo if lo > 0 else 1e-12
            bnd = hi if math.isfinite(hi) else max(1e9, 1e3 * a)
            grid = np.geomspace(a, bnd, 65)
            vals = [F(x) / x ** p for x in grid]
            k = int(np.argmax(vals))
            la, lb = math.log(grid[max(k - 1, 0)]), math.log(grid[min(k + 1, 64)])
            res = optimize.minimize_scalar(lambda u: -F(math.exp(u)) / math.exp(u) ** p,
                                           bounds=(la, lb), method="bounded",
                                           options={"xatol": 1e-10})
            cand += [float(grid[k]), math.exp(res.x)]
    best, arg = 0.0, x_min
    for x in cand:
        if x <= 0 or x < x_min or not math.isfinite(x):
            continue
        v = F(x) / x ** p
        if v > best:
            best, arg = v, x
    for v, at in limits:
        if v > best:
            best, arg = v, at
    return RatioSup(best, arg)


def widom_constant(mu: PositiveMeasure, x_min: float = 1.0) -> RatioSup:
    """``sup_{x >= x_min} mu[0, x] / x``.

    ``x_min = 1`` is the finite-interval Hankel test, ``x_min = 0`` the
    classical one on the whole half-line.
    """
    return _axis_ratio_sup(mu, 1.0, x_min)


def power_weight_constant(mu: PositiveMeasure, alpha: float, x_min: float = 1.0) -> RatioSup:
    """``sup_{x >= x_min} mu[0, x] / x**(1 + 2 alpha)`` (power-weighted Hankel test)."""
    if alpha < 0 or not math.isfinite(alpha):
        raise InputError(f"alpha must be finite and nonnegative, got {alpha}")
    return _axis_ratio_sup(mu, 1.0 + 2.0 * alpha, x_min)
