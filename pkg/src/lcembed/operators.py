"""Nystrom discretisations of truncated Hankel operators and friends.

All kernels are discretised symmetrically, ``M_ij = sqrt(w_i) k(t_i, t_j)
sqrt(w_j)``, on composite Gauss-Legendre grids, so that the spectral data of
``M`` approximates that of the integral operator on ``L^2(0, T)`` and
Hermitian kernels give Hermitian matrices.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import optimize, special

from .errors import DivergenceError, HypothesisViolation, InputError
from .inner import HALF_PLANE, InnerFunction
from .measure import DensityPiece, PositiveMeasure, PowerPiece, integrate_kernel

SCHEMES = ("uniform", "graded", "symmetric-graded", "geometric")


@dataclass(frozen=True)
class QuadratureGrid:
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    scheme: str
    T: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        t, w = np.asarray(self.nodes, float), np.asarray(self.weights, float)
        if t.ndim != 1 or t.shape != w.shape or t.size == 0:
            raise InputError("grid nodes and weights must be matching nonempty vectors")
        if np.any(np.diff(t) <= 0):
            raise InputError("grid nodes must be strictly increasing")
        if np.any(w <= 0):
            raise InputError("grid weights must be positive")
        t.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "nodes", t)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.nodes.size

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        t, w = self.nodes, self.weights
        return bool(np.all(np.abs(t + t[::-1] - self.T) <= tol * self.T)
                    and np.all(np.abs(w - w[::-1]) <= tol * w.max()))

    def describe(self):
        return {"scheme": self.scheme, "n": self.n, "T": self.T, **self.params}

    @classmethod
    def build(cls, T: float, n: int = 200, scheme: str = "graded", *, gamma: float = 2.0,
              order: int = 8, t_min: float = 1e-3, panels_per_decade: int = 4) -> "QuadratureGrid":
        """Composite Gauss-Legendre grid with ``order`` nodes per panel.

        ``n`` is rounded up to a multiple of ``order`` (to an even number of
        panels for the symmetric scheme).  ``geometric`` ignores ``n`` and uses
        ``[0, t_min]`` plus ``panels_per_decade`` log-spaced panels up to ``T``.
        """
        if not (T > 0 and math.isfinite(T)):
            raise InputError(f"grid length T must be positive and finite, got {T}")
        if scheme not in SCHEMES:
            raise InputError(f"unknown grid scheme {scheme!r}; expected one of {SCHEMES}")
        if order < 1 or n < 1:
            raise InputError("grid needs n >= 1 and order >= 1")
        panels = max(1, -(-n // order))
        params: dict = {"order": order}
        if scheme == "uniform":
            edges = np.linspace(0.0, T, panels + 1)
        elif scheme == "graded":
            edges = T * np.linspace(0.0, 1.0, panels + 1) ** gamma
            params["gamma"] = gamma
        elif scheme == "symmetric-graded":
            half = max(1, -(-panels // 2))
            left = 0.5 * T * np.linspace(0.0, 1.0, half + 1) ** gamma
            edges = np.concatenate([left, (T - left[::-1])[1:]])
            params["gamma"] = gamma
        else:
            if not 0 < t_min < T:
                raise InputError("geometric grid needs 0 < t_min < T")
            m = max(1, int(math.ceil(math.log10(T / t_min) * panels_per_decade)))
            edges = np.concatenate([[0.0], np.geomspace(t_min, T, m + 1)])
            params.update(t_min=t_min, panels_per_decade=panels_per_decade)
        x, w = np.polynomial.legendre.leggauss(order)
        a, b = edges[:-1, None], edges[1:, None]
        nodes = (0.5 * (b - a) * x[None, :] + 0.5 * (a + b)).ravel()
        weights = (0.5 * (b - a) * w[None, :]).ravel()
        if scheme == "symmetric-graded":
            # mirror the left half so that t -> T - t is exact on the nodes
            k = nodes.size // 2
            nodes = np.concatenate([nodes[:k], T - nodes[:k][::-1]])
            weights = np.concatenate([weights[:k], weights[:k][::-1]])
        return cls(nodes, weights, scheme, float(T), params)


@dataclass(frozen=True)
class DiscretizedOperator:
    matrix: np.ndarray = field(repr=False)
    grid: QuadratureGrid | None
    kind: str
    meta: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.matrix.shape

    def save(self, path, fmt: str | None = None) -> list[Path]:
        """Write the matrix as ``.npy`` or ``.csv``; complex CSV gets a ``_imag`` companion."""
        path = Path(path)
        fmt = fmt or path.suffix.lstrip(".") or "npy"
        if fmt == "npy":
            np.save(path.with_suffix(".npy"), self.matrix)
            return [path.with_suffix(".npy")]
        if fmt != "csv":
            raise InputError(f"unknown matrix format {fmt!r} (npy or csv)")
        out = [path.with_suffix(".csv")]
        np.savetxt(out[0], self.matrix.real, delimiter=",", fmt="%.17g")
        if np.iscomplexobj(self.matrix) and np.any(self.matrix.imag):
            out.append(path.with_name(path.stem + "_imag.csv"))
            np.savetxt(out[1], self.matrix.imag, delimiter=",", fmt="%.17g")
        return out


# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------

def _power_laplace_at(p: PowerPiece, t):
    """``int_{x0}^{x1} c x**beta exp(-x t) dx`` via (incomplete) gamma functions."""
    a = p.beta + 1.0
    hi = 1.0 if math.isinf(p.x1) else special.gammainc(a, p.x1 * t)
    lo = 0.0 if p.x0 == 0.0 else special.gammainc(a, p.x0 * t)
    return p.c * special.gamma(a) * (hi - lo) / t ** a


def laplace_symbol(mu: PositiveMeasure, t):
    """``h(t) = int exp(-s t) dmu(s)`` for ``t > 0`` (scalar or array).

    Atoms are summed exactly and power pieces with ``beta > -1`` use gamma
    functions (``dx -> 1/t``, ``dx/sqrt(x) -> sqrt(pi/t)``); any other piece
    goes through adaptive quadrature.
    """
    if mu.domain == "disc":
        raise InputError("Laplace symbols need a measure on the half-plane or axis")
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr > 0)):
        raise InputError("the symbol is evaluated at t > 0 only")
    flat = t_arr.ravel()
    out = np.zeros(flat.size, dtype=np.complex128)
    if mu.masses.size:
        out += np.exp(-np.outer(flat, mu.locations)) @ mu.masses
    rest = []
    for p in mu.radial:
        if isinstance(p, PowerPiece) and (p.beta > -1.0 or p.x0 > 0) and p.c > 0:
            if p.beta > -1.0:
                out += _power_laplace_at(p, flat)
            else:
                rest.append(PositiveMeasure("axis", radial=[p]))
        elif isinstance(p, DensityPiece):
            rest.append(PositiveMeasure("axis", radial=[p]))
    if mu.planar or mu.vertical:
        rest.append(PositiveMeasure("half-plane", planar=mu.planar, vertical=mu.vertical))
    for sub in rest:
        for i, tt in enumerate(flat):
            out[i] += integrate_kernel(sub, lambda s, tt=tt: np.exp(-s * tt))[0]
    if not np.all(np.isfinite(out)):
        raise DivergenceError("Laplace transform diverges", complex(out[~np.isfinite(out)][0]))
    if np.all(out.imag == 0):
        out = out.real
    out = out.reshape(t_arr.shape)
    return out.item() if out.ndim == 0 else out


def symbol_from_measure(mu: PositiveMeasure) -> Callable:
    return lambda t: laplace_symbol(mu, t)


def _eval_symbol(h: Callable, x: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(h(x))
        if vals.shape != x.shape:
            raise ValueError
    except (TypeError, ValueError):
        vals = np.vectorize(h, otypes=[complex])(x)
        if np.all(vals.imag == 0):
            vals = vals.real
    if not np.all(np.isfinite(vals)):
        raise DivergenceError("symbol is not finite on the grid", float("nan"))
    return vals


# ---------------------------------------------------------------------------
# discretisations
# ---------------------------------------------------------------------------

def discretize_hankel(h: Callable, grid: QuadratureGrid) -> DiscretizedOperator:
    """``M_ij = sqrt(w_i) h(t_i + t_j) sqrt(w_j)``."""
    t, sw = grid.nodes, np.sqrt(grid.weights)
    K = _eval_symbol(h, t[:, None] + t[None, :])
    return DiscretizedOperator(sw[:, None] * K * sw[None, :], grid, "hankel")


def discretize_weighted_hankel(h: Callable, alpha: float, grid: QuadratureGrid) -> DiscretizedOperator:
    """Kernel ``t**alpha h(t + tau) tau**alpha``."""
    if not (alpha >= 0 and math.isfinite(alpha)):
        raise InputError(f"alpha must be finite and nonnegative, got {alpha}")
    t = grid.nodes
    sw = np.sqrt(grid.weights) * t ** alpha
    K = _eval_symbol(h, t[:, None] + t[None, :])
    return DiscretizedOperator(sw[:, None] * K * sw[None, :], grid, "weighted-hankel", {"alpha": alpha})


def toeplitz_via_reversal(h: Callable, grid: QuadratureGrid) -> DiscretizedOperator:
    """Reversed Hankel: kernel ``g(t - tau)`` with ``g(x) = h(T - x)``.

    Needs a grid invariant under ``t -> T - t``; the reversal is then an exact
    permutation of the nodes and the two matrices share singular values.
    """
    if not grid.is_symmetric():
        raise InputError("toeplitz_via_reversal needs a grid symmetric under t -> T - t "
                         "(use scheme 'symmetric-graded' or 'uniform')")
    t, sw, T = grid.nodes, np.sqrt(grid.weights), grid.T
    # T - (t_i - t_j) written as t_{n-1-i} + t_j keeps the symmetry exact
    K = _eval_symbol(h, t[::-1][:, None] + t[None, :])
    return DiscretizedOperator(sw[:, None] * K * sw[None, :], grid, "toeplitz-reversal", {"T": T})


def _quantile_atoms(p, count: int):
    total = p.mass()
    if not math.isfinite(total):
        raise InputError("a density of infinite mass cannot be atomized; restrict its support")
    if total == 0.0:
        return np.zeros(0), np.zeros(0)
    hi = p.x1
    if math.isinf(hi):
        hi = max(1.0, p.x0 + 1.0)
        while p.mass(p.x0, hi) < total * (1 - 1e-12):
            hi *= 2.0
    locs = np.empty(count)
    for k in range(count):
        target = total * (k + 0.5) / count
        locs[k] = optimize.brentq(lambda x: p.mass(p.x0, x) - target, p.x0, hi, xtol=1e-15, rtol=1e-14)
    return locs, np.full(count, total / count)


def atomize(mu: PositiveMeasure, per_piece: int = 512) -> PositiveMeasure:
    """Replace every radial piece by ``per_piece`` equal-mass atoms at mass quantiles."""
    if mu.planar or mu.vertical:
        raise InputError("only atoms and radial pieces can be atomized")
    atoms = list(zip(mu.locations, mu.masses))
    for p in mu.radial:
        locs, m = _quantile_atoms(p, per_piece)
        atoms.extend(zip(locs, m))
    return PositiveMeasure(mu.domain, atoms)


def embedding_matrix(mu: PositiveMeasure, grid: QuadratureGrid, atoms: int = 512) -> DiscretizedOperator:
    """``Z_ji = sqrt(m_j) exp(-s_j t_i) sqrt(w_i)`` for an (atomized) measure.

    ``meta`` records the factorisation residual ``||Z*Z - M_hankel||_F`` (real
    support only) and, for densities, the change under doubling the atom count.
    """
    if mu.domain == "disc":
        raise InputError("embedding needs a half-plane or axis measure")
    meta: dict = {}

    def build(m):
        s, mass = m.locations, m.masses
        return np.sqrt(mass)[:, None] * np.exp(-np.outer(s, grid.nodes)) * np.sqrt(grid.weights)[None, :]

    if mu.is_atomic:
        disc_mu = mu
    else:
        disc_mu = atomize(mu, atoms)
        Z2 = build(atomize(mu, 2 * atoms))
        Z1 = build(disc_mu)
        g1, g2 = Z1.conj().T @ Z1, Z2.conj().T @ Z2
        meta["atoms_per_piece"] = atoms
        meta["atomization_change"] = float(np.linalg.norm(g1 - g2) / max(np.linalg.norm(g2), 1e-300))
    Z = build(disc_mu)
    if Z.size and np.all(Z.imag == 0):
        Z = Z.real
    if mu.on_real_axis:
        H = discretize_hankel(symbol_from_measure(mu), grid).matrix
        meta["factorization_residual"] = float(np.linalg.norm(Z.conj().T @ Z - H))
        meta["hankel_fro"] = float(np.linalg.norm(H))
    return DiscretizedOperator(Z, grid, "embedding", meta)


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

class NormEstimate(NamedTuple):
    norm: float
    iterations: int
    converged: bool

    def __float__(self):
        return self.norm


def operator_norm(op, tol: float = 1e-8, max_iter: int = 20000, seed: int = 0) -> NormEstimate:
    """Largest singular value by power iteration on ``M^H M``.

    The start vector comes from a seeded generator, so repeated calls agree
    bit for bit.  Stops when the eigen-residual of ``M^H M`` drops below
    ``tol`` times the current Rayleigh quotient.
    """
    M = op.matrix if isinstance(op, DiscretizedOperator) else np.asarray(op)
    if M.size == 0:
        return NormEstimate(0.0, 0, True)
    A = M.conj().T @ M
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(A.shape[0])
    if np.iscomplexobj(A):
        x = x + 1j * rng.standard_normal(A.shape[0])
    x /= np.linalg.norm(x)
    lam = 0.0
    for it in range(1, max_iter + 1):
        y = A @ x
        lam = float(np.real(np.vdot(x, y)))
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return NormEstimate(0.0, it, True)
        if np.linalg.norm(y - lam * x) <= tol * max(lam, 1e-300):
            return NormEstimate(math.sqrt(max(lam, 0.0)), it, True)
        x = y / ny
    return NormEstimate(math.sqrt(max(lam, 0.0)), max_iter, False)


@dataclass(frozen=True)
class TraceReport:
    hs: float
    trace: float
    min_eigenvalue: float
    measure_side: float | None = None
    printed_display: float | None = None

    def to_dict(self):
        d = {"hs": self.hs, "trace": self.trace, "min_eigenvalue": self.min_eigenvalue}
        if self.measure_side is not None:
            d["measure_side"] = self.measure_side
            d["measure_side_formula"] = "int (1 - |theta(s)|^2) / (2 Re s) dmu(s)"
            d["printed_display"] = self.printed_display
            d["printed_display_note"] = ("printed closed form (1/4pi^2) int |(1-|theta|^2)/(2s)|^2 dmu "
                                         "squares the kernel norm and uses s for Re s; it disagrees with "
                                         "the rank-one case and is reported for comparison only")
        return d


def hs_and_trace_norms(op, mu: PositiveMeasure | None = None, theta: InnerFunction | None = None,
                       psd_tol: float = 1e-10) -> TraceReport:
    """Hilbert-Schmidt and trace norms of a discretised positive operator.

    For ``embedding`` operators ``Z`` the trace is that of ``Z^* Z``.  With a
    measure, the measure-side value ``int ||P_K exp(-conj(s) .)||^2 dmu`` is
    added (``theta`` defaults to ``exp(-T s)`` for the grid's ``T``).
    """
    M = op.matrix if isinstance(op, DiscretizedOperator) else np.asarray(op)
    kind = op.kind if isinstance(op, DiscretizedOperator) else "matrix"
    if kind == "embedding":
        hs = float(np.linalg.norm(M))
        G = M.conj().T @ M
    else:
        if M.shape[0] != M.shape[1]:
            raise InputError("trace needs a square matrix")
        hs = float(np.linalg.norm(M))
        G = M
    scale = max(float(np.linalg.norm(G, 2)) if G.size else 0.0, 1e-300)
    if G.size and np.linalg.norm(G - G.conj().T) > 1e-12 * max(np.linalg.norm(G), 1e-300):
        raise InputError("trace norm via eigenvalues needs a Hermitian matrix")
    ev = np.linalg.eigvalsh(0.5 * (G + G.conj().T)) if G.size else np.zeros(0)
    lo = float(ev.min()) if ev.size else 0.0
    if lo < -psd_tol * scale:
        raise HypothesisViolation(f"matrix is not positive semidefinite: eigenvalue {lo:.3e}")
    trace = float(ev.sum())
    ms = pd = None
    if mu is not None:
        from .cohn import measure_side_trace, printed_trace_display

        if theta is None:
            if not isinstance(op, DiscretizedOperator) or op.grid is None:
                raise InputError("measure-side trace needs theta or a grid to read T from")
            theta = InnerFunction.singular(op.grid.T)
        ms = measure_side_trace(mu, theta)
        pd = printed_trace_display(mu, theta)
    return TraceReport(hs, trace, lo, ms, pd)


# ---------------------------------------------------------------------------
# Hankel operators on finite-dimensional model spaces
# ---------------------------------------------------------------------------

def model_hankel_finite(mu: PositiveMeasure, theta: InnerFunction, cond_limit: float = 1e12) -> DiscretizedOperator:
    """Compression of the Hankel form to the model space of a finite Blaschke product.

    Basis ``e_k(t) = exp(-conj(s_k) t)``, Gram ``G_jk = 1 / (s_j + conj(s_k))``,
    form ``H_jk = int dmu(x) / ((x + s_j)(x + conj(s_k)))``; the returned
    matrix is ``G^{-1/2} H G^{-1/2}``.
    """
    if theta.domain != HALF_PLANE or not theta.is_finite_blaschke:
        raise InputError("model_hankel_finite needs a finite Blaschke product on the half-plane")
    s = theta.zeros
    if s.size == 0:
        raise InputError("model space of a constant inner function is trivial")
    if np.unique(s).size != s.size:
        raise InputError("model_hankel_finite needs distinct zeros")
    if mu.domain == "disc":
        raise InputError("expected a half-plane or axis measure")
    G = 1.0 / (s[:, None] + np.conj(s)[None, :])
    cond = float(np.linalg.cond(G))
    meta = {"gram_condition": cond, "zeros": [[z.real, z.imag] for z in s]}
    if cond > cond_limit:
        warnings.warn(f"Gram matrix is ill-conditioned (cond = {cond:.3e}); zeros nearly coincide",
                      RuntimeWarning, stacklevel=2)
        meta["warning"] = "ill-conditioned Gram matrix"
    m = s.size
    H = np.zeros((m, m), dtype=np.complex128)
    if mu.masses.size:
        x = mu.locations
        A = 1.0 / (x[:, None] + s[None, :])           # (atom, j)
        B = 1.0 / (x[:, None] + np.conj(s)[None, :])  # (atom, k)
        H += (A * mu.masses[:, None]).T @ B
    if not mu.is_atomic:
        dens = PositiveMeasure(mu.domain, (), mu.radial, mu.planar, mu.vertical)
        for j in range(m):
            for k in range(m):
                H[j, k] += integrate_kernel(
                    dens, lambda x, j=j, k=k: 1.0 / ((x + s[j]) * (x + np.conj(s[k]))))[0]
    w, V = np.linalg.eigh(G)
    Gm = (V / np.sqrt(w)[None, :]) @ V.conj().T
    out = Gm @ H @ Gm
    if np.all(np.abs(out.imag) <= 1e-15 * max(np.abs(out).max(), 1e-300)):
        out = out.real
    return DiscretizedOperator(out, None, "model-hankel", meta)


# ---------------------------------------------------------------------------
# sweeps and tables
# ---------------------------------------------------------------------------

TABLE_COLUMNS = ("n", "T", "scheme", "norm", "hs", "trace")


def convergence_table(h: Callable, Ts: Sequence[float], ns: Sequence[int], scheme: str = "graded",
                      psd: bool = True, **grid_kw) -> list[dict]:
    """Rows ``(n, T, scheme, norm, hs, trace)`` in a fixed order (T outer, n inner)."""
    rows = []
    for T in Ts:
        for n in ns:
            g = QuadratureGrid.build(T, n, scheme, **grid_kw)
            op = discretize_hankel(h, g)
            nrm = operator_norm(op).norm
            if psd:
                try:
                    tr = hs_and_trace_norms(op)
                    hs, trace = tr.hs, tr.trace
                except (HypothesisViolation, InputError):
                    hs, trace = float(np.linalg.norm(op.matrix)), math.nan
            else:
                hs, trace = float(np.linalg.norm(op.matrix)), math.nan
            rows.append({"n": g.n, "T": float(T), "scheme": scheme, "norm": nrm, "hs": hs, "trace": trace})
    return rows


def write_table_csv(rows: list[dict], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(TABLE_COLUMNS)
        for r in rows:
            wr.writerow([r[c] if isinstance(r[c], str) else repr(r[c]) for c in TABLE_COLUMNS])
    return path
