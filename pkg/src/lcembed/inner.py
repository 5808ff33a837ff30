"""Inner functions on the right half-plane and on the disc.

Representable functions are finite Blaschke products times an optional
singular factor.  On the half-plane the factors are

    b_z(s) = (s - z) / (s + conj(z)),     theta_T(s) = exp(-T s),

with no unimodular normalising constants.  On the disc they are

    b_a(z) = (z - a) / (1 - conj(a) z),   phi_T(z) = exp(T (z - 1) / (z + 1)).

The two pictures are linked by the involution ``M(z) = (1 - z) / (1 + z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import HypothesisViolation, InputError, PoleError
from .measure import DensityPiece, PositiveMeasure, PowerPiece

HALF_PLANE = "half-plane"
DISC = "disc"

_POLE_TOL = 1e-14


def _as_complex(s) -> complex:
    try:
        s = complex(s)
    except (TypeError, ValueError):
        raise InputError(f"not a complex number: {s!r}") from None
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise InputError(f"point must be finite, got {s}")
    return s


class InnerFunction:
    """Finite Blaschke product with an optional singular factor.

    ``zeros`` may repeat; ``singular_T`` is the ``T`` of the singular factor
    (0 for none).
    """

    __slots__ = ("domain", "zeros", "singular_T")

    def __init__(self, zeros: Iterable = (), singular_T: float = 0.0, domain: str = HALF_PLANE):
        if domain not in (HALF_PLANE, DISC):
            raise InputError(f"inner function domain must be 'half-plane' or 'disc', got {domain!r}")
        z = np.array([_as_complex(a) for a in zeros], dtype=np.complex128)
        if domain == HALF_PLANE and z.size and np.any(z.real <= 0):
            k = int(np.flatnonzero(z.real <= 0)[0])
            raise InputError(f"blaschke_zeros[{k}]: zero must lie in the open right half-plane, got {z[k]}")
        if domain == DISC and z.size and np.any(np.abs(z) >= 1):
            k = int(np.flatnonzero(np.abs(z) >= 1)[0])
            raise InputError(f"blaschke_zeros[{k}]: zero must lie in the open unit disc, got {z[k]}")
        T = float(singular_T)
        if not (T >= 0 and math.isfinite(T)):
            raise InputError(f"singular_T must be finite and nonnegative, got {singular_T}")
        z.flags.writeable = False
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "zeros", z)
        object.__setattr__(self, "singular_T", T)

    def __setattr__(self, name, value):
        raise AttributeError("InnerFunction is immutable")

    def __repr__(self):
        return f"InnerFunction(zeros={self.zeros.tolist()}, singular_T={self.singular_T}, domain={self.domain!r})"

    @classmethod
    def singular(cls, T: float, domain: str = HALF_PLANE):
        if not T > 0:
            raise InputError("singular factor needs T > 0")
        return cls((), T, domain)

    @classmethod
    def blaschke(cls, zeros, domain: str = HALF_PLANE):
        return cls(zeros, 0.0, domain)

    @property
    def is_finite_blaschke(self) -> bool:
        return self.singular_T == 0.0

    def with_multiplicities(self):
        """``[(zero, multiplicity), ...]`` in first-appearance order."""
        out: list[list] = []
        for a in self.zeros.tolist():
            for item in out:
                if item[0] == a:
                    item[1] += 1
                    break
            else:
                out.append([a, 1])
        return [tuple(x) for x in out]

    # evaluation -------------------------------------------------------------

    def _check_point(self, s: complex):
        if self.domain == HALF_PLANE:
            if s.real < 0:
                raise InputError(f"evaluation point {s} outside the closed right half-plane")
            if self.zeros.size and np.any(np.abs(s + np.conj(self.zeros)) <= _POLE_TOL):
                raise PoleError(f"evaluation at the pole {s} of a Blaschke factor")
        else:
            if abs(s) > 1 + 1e-12:
                raise InputError(f"evaluation point {s} outside the closed unit disc")
            if self.singular_T > 0 and abs(s + 1) <= _POLE_TOL:
                raise PoleError("evaluation at -1, the singular point of exp(T(z-1)/(z+1))")
            if self.zeros.size and np.any(np.abs(1 - np.conj(self.zeros) * s) <= _POLE_TOL):
                raise PoleError(f"evaluation at the pole {s} of a Blaschke factor")

    def _factors(self, s: complex):
        """Individual Blaschke factor values and derivatives at ``s``."""
        a = self.zeros
        if self.domain == HALF_PLANE:
            den = s + np.conj(a)
            return (s - a) / den, 2.0 * a.real / den ** 2
        den = 1.0 - np.conj(a) * s
        return (s - a) / den, (1.0 - np.abs(a) ** 2) / den ** 2

    def _singular(self, s: complex):
        """(value, log-derivative) of the singular factor."""
        T = self.singular_T
        if T == 0:
            return 1.0 + 0j, 0j
        if self.domain == HALF_PLANE:
            return np.exp(-T * s), -T + 0j
        return np.exp(T * (s - 1) / (s + 1)), 2.0 * T / (s + 1) ** 2

    def evaluate(self, s) -> complex:
        s = _as_complex(s)
        self._check_point(s)
        vals, _ = self._factors(s)
        sv, _ = self._singular(s)
        return complex(np.prod(vals) * sv)

    __call__ = evaluate

    def derivative(self, s) -> complex:
        s = _as_complex(s)
        self._check_point(s)
        vals, ders = self._factors(s)
        sv, sl = self._singular(s)
        total = 0j
        for k in range(vals.size):
            total += ders[k] * np.prod(np.delete(vals, k))
        return complex(total * sv + np.prod(vals) * sv * sl)

    def log_modulus_and_derivative(self, s) -> tuple[float, complex]:
        """``(log|theta(s)|, theta'(s))``; the log is ``-inf`` at a zero."""
        s = _as_complex(s)
        self._check_point(s)
        return self._log_modulus_scalar(s), self.derivative(s)

    def _log_modulus_scalar(self, s: complex) -> float:
        a = self.zeros
        if a.size and np.any(a == s):
            return -math.inf
        if self.domain == HALF_PLANE:
            r = 4.0 * a.real * s.real / np.abs(s + np.conj(a)) ** 2
            sing = -self.singular_T * s.real
        else:
            r = (1.0 - np.abs(a) ** 2) * (1.0 - abs(s) ** 2) / np.abs(1.0 - np.conj(a) * s) ** 2
            sing = -self.singular_T * (1.0 - abs(s) ** 2) / abs(1.0 + s) ** 2 if self.singular_T else 0.0
        # log1p keeps precision when |theta| is close to 1
        with np.errstate(divide="ignore"):
            return float(0.5 * np.log1p(-r).sum() + sing)

    def log_modulus(self, points) -> np.ndarray:
        """Vectorised ``log|theta|`` over an array of points (no pole checks)."""
        z = np.atleast_1d(np.asarray(points, dtype=np.complex128)).ravel()
        if self.domain == HALF_PLANE:
            out = _kernels.halfplane_log_modulus(z, self.zeros)
            if self.singular_T:
                out = out - self.singular_T * z.real
        else:
            out = _kernels.disc_log_modulus(z, self.zeros)
            if self.singular_T:
                out = out - self.singular_T * (1.0 - np.abs(z) ** 2) / np.abs(1.0 + z) ** 2
        return out

    def modulus(self, points) -> np.ndarray:
        return np.exp(self.log_modulus(points))

    def log_derivative(self, s) -> complex:
        """``theta'(s) / theta(s)`` as a sum over factors."""
        s = _as_complex(s)
        self._check_point(s)
        a = self.zeros
        if a.size and np.any(a == s):
            raise PoleError(f"log-derivative undefined at the zero {s}")
        _, sl = self._singular(s)
        if self.domain == HALF_PLANE:
            terms = 2.0 * a.real / ((s + np.conj(a)) * (s - a))
        else:
            terms = (1.0 - np.abs(a) ** 2) / ((1.0 - np.conj(a) * s) * (s - a))
        return complex(terms.sum() + sl)

    # spectrum and transfer -------------------------------------------------

    def spectrum(self) -> "SpectrumInfo":
        pts = tuple(z for z, _ in self.with_multiplicities())
        if self.domain == HALF_PLANE:
            return SpectrumInfo(pts, self.singular_T > 0, ())
        return SpectrumInfo(pts, False, (-1 + 0j,) if self.singular_T > 0 else ())

    def to_disc(self) -> "InnerFunction":
        """``phi = theta o M`` on the disc (same modulus at corresponding points)."""
        if self.domain == DISC:
            return self
        return InnerFunction(mobius_point(self.zeros) if self.zeros.size else (), self.singular_T, DISC)

    def to_halfplane(self) -> "InnerFunction":
        if self.domain == HALF_PLANE:
            return self
        return InnerFunction(mobius_point(self.zeros) if self.zeros.size else (), self.singular_T, HALF_PLANE)

    def to_dict(self):
        return {
            "domain": self.domain,
            "blaschke_zeros": [{"re": z.real, "im": z.imag, "mult": m} for z, m in self.with_multiplicities()],
            "singular_T": self.singular_T,
        }


@dataclass(frozen=True)
class SpectrumInfo:
    """Spectrum of a representable inner function.

    ``points`` are the (finitely many) zeros.  On the half-plane the singular
    factor contributes the point at infinity; on the disc it contributes the
    boundary point -1.
    """

    points: tuple
    at_infinity: bool = False
    boundary_points: tuple = ()

    @property
    def finite_points(self):
        return self.points + self.boundary_points

    def dist_to(self, p) -> float:
        """Euclidean distance from ``p`` to the finite part of the spectrum.

        Infinity sits at infinite distance, so ``sigma = {inf}`` gives ``inf``.
        """
        pts = self.finite_points
        if not pts:
            return math.inf
        return float(np.min(np.abs(np.asarray(pts) - complex(p))))

    def contains(self, p, tol: float = 0.0) -> bool:
        return self.dist_to(p) <= tol

    def contains_infinity(self) -> bool:
        return self.at_infinity

    def sup_modulus(self) -> float:
        if self.at_infinity:
            return math.inf
        pts = self.finite_points
        return float(np.max(np.abs(pts))) if pts else 0.0

    def is_empty(self) -> bool:
        return not self.finite_points and not self.at_infinity

    def chordal_dist_to(self, p) -> float:
        """Distance in the metric ``|1/(1+|z|)|`` used only for reports."""
        d = self.dist_to(p)
        if self.at_infinity:
            d = min(d, 1.0 / (1.0 + abs(complex(p))))
        return d

    def to_dict(self):
        return {
            "points": [{"re": z.real, "im": z.imag} for z in self.points],
            "infinity": self.at_infinity,
            "boundary_points": [{"re": z.real, "im": z.imag} for z in self.boundary_points],
        }


def spectrum(theta: InnerFunction) -> SpectrumInfo:
    return theta.spectrum()


# ---------------------------------------------------------------------------
# Mobius transfer
# ---------------------------------------------------------------------------

def mobius_point(z):
    """``M(z) = (1 - z) / (1 + z)``; accepts scalars or arrays."""
    z_arr = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(z_arr + 1.0) == 0.0):
        raise PoleError("M is undefined at -1")
    out = (1.0 - z_arr) / (1.0 + z_arr)
    return complex(out) if out.ndim == 0 else out


# M is an involution
mobius_inverse = mobius_point


def transfer_measure_disc_to_halfplane(rho: PositiveMeasure) -> PositiveMeasure:
    """``d mu(s) = 4 d rho(z) / |1 + z|^2`` with ``s = M(z)``.

    Atoms move pointwise.  A density ``f`` on a segment of ``[-1, 1]`` becomes
    the density ``2 f(M(s))`` on the image segment of ``[0, inf)``.
    """
    if rho.domain != DISC:
        raise InputError("expected a measure on the disc")
    if rho.planar or rho.vertical:
        raise InputError("only atoms and radial pieces can be transferred")
    locs, m = rho.locations, rho.masses
    if np.any((np.abs(locs + 1.0) < 1e-15) & (m > 0)):
        raise HypothesisViolation("measure puts mass on -1, which M sends to infinity")
    atoms = [] if locs.size == 0 else list(zip(mobius_point(locs), 4.0 * m / np.abs(1.0 + locs) ** 2))
    radial = []
    for p in rho.radial:
        lo = 0.0 if p.x1 >= 1.0 else mobius_point(p.x1).real
        hi = math.inf if p.x0 <= -1.0 else mobius_point(p.x0).real
        if isinstance(p, PowerPiece) and p.beta == 0.0:
            radial.append(PowerPiece(lo, hi, 2.0 * p.c, 0.0))
        else:
            f = p.density
            radial.append(DensityPiece(lo, hi, lambda s, f=f: 2.0 * f((1.0 - s) / (1.0 + s)),
                                       f"transfer({getattr(p, 'label', 'power')})"))
    # real disc points land on [0, inf): keep the result on the axis when possible
    on_axis = all(abs(complex(s).imag) <= 1e-15 for s, _ in atoms)
    if on_axis:
        atoms = [(complex(s).real, w) for s, w in atoms]
    return PositiveMeasure("axis" if on_axis else HALF_PLANE, atoms, radial)


def transfer_measure_halfplane_to_disc(mu: PositiveMeasure) -> PositiveMeasure:
    """Inverse of :func:`transfer_measure_disc_to_halfplane`."""
    if mu.domain == DISC:
        raise InputError("expected a measure on the half-plane or the axis")
    if mu.planar or mu.vertical:
        raise InputError("only atoms and radial pieces can be transferred")
    locs, m = mu.locations, mu.masses
    atoms = [] if locs.size == 0 else list(zip(mobius_point(locs), m / np.abs(1.0 + locs) ** 2))
    radial = []
    for p in mu.radial:
        lo = -1.0 if math.isinf(p.x1) else mobius_point(p.x1).real
        hi = mobius_point(p.x0).real
        if isinstance(p, PowerPiece) and p.beta == 0.0:
            radial.append(PowerPiece(lo, hi, 0.5 * p.c, 0.0))
        else:
            f = p.density
            radial.append(DensityPiece(lo, hi, lambda t, f=f: 0.5 * f((1.0 - t) / (1.0 + t)),
                                       f"transfer({getattr(p, 'label', 'power')})"))
    return PositiveMeasure(DISC, atoms, radial)


# ---------------------------------------------------------------------------
# log-modulus bound near a spectral gap
# ---------------------------------------------------------------------------

def baranov_log_bound(theta: InnerFunction, omega: float, z) -> float:
    """Upper bound for ``log|theta(z)|`` in the cone over a gap ``i omega``.

    With ``delta = dist(i omega, sigma(theta))`` and ``p = i omega + delta/4``,
    returns ``-(delta**2 / 48) / Re z * |theta'(p)| / |theta(p)|``, valid for
    ``|Im z - omega| <= Re z`` and ``Re z >= delta``.
    """
    if theta.domain != HALF_PLANE:
        raise InputError("the log-modulus bound is stated on the half-plane")
    if not theta.is_finite_blaschke:
        raise HypothesisViolation("precondition failed: theta must be a finite Blaschke product")
    if theta.zeros.size == 0:
        raise HypothesisViolation("precondition failed: theta has no zeros, so sigma(theta) is empty")
    z = _as_complex(z)
    omega = float(omega)
    delta = theta.spectrum().dist_to(1j * omega)
    if not delta > 0:
        raise HypothesisViolation(f"precondition failed: i*omega = {1j * omega} lies on the spectrum")
    slack = 1e-12 * max(1.0, abs(z))
    if abs(z.imag - omega) > z.real + slack:
        raise HypothesisViolation(f"precondition failed: z={z} is outside the cone |Im z - omega| <= Re z")
    if z.real < delta - slack:
        raise HypothesisViolation(f"precondition failed: Re z={z.real} < delta={delta}")
    p = 1j * omega + delta / 4.0
    ratio = abs(theta.log_derivative(p))
    return -(delta ** 2 / 48.0) / z.real * ratio
