"""Desk-scale statistics of the expanding map ``g``.

The Ulam matrix is built from exact preimage lengths: each partition piece
of ``g`` is cut at the source-bin edges and at the preimages of the
target-bin edges, and every elementary segment contributes its length to a
single ``(source, target)`` entry. No sampling is involved.

Everything here runs in double precision regardless of the backend of the
input map.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .backend import FLOAT
from .errors import NumericalError
from .maps import Affine, ExpandingMap, build_inverse, validate_system


def as_float(g: ExpandingMap) -> ExpandingMap:
    if not g.backend.exact:
        return g
    return build_inverse(validate_system(g.system.branches, FLOAT))


class VectorMap:
    """Vectorised float evaluation of an expanding map on numpy arrays."""

    def __init__(self, g: ExpandingMap):
        g = as_float(g)
        self.g = g
        self.pieces = g.pieces
        self.los = np.array([float(p.interval.lo) for p in g.pieces])
        self.lo_open = np.array([not p.interval.lo_closed for p in g.pieces])
        affine = [p.slope is not None for p in g.pieces]
        self.all_affine = all(affine)
        # forward map of an affine piece is slope * x + offset
        self.slope = np.array([float(p.slope) if p.slope is not None else np.nan for p in g.pieces])
        self.offset = np.array(
            [float(-p.slope * p.interval.lo) if p.label.startswith("B") else self._a_offset(p) for p in g.pieces]
        )

    @staticmethod
    def _a_offset(p):
        br = p.backward
        if isinstance(br, Affine):
            return float(-br.intercept / br.slope)
        return np.nan

    def index(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.los, x, side="right") - 1
        idx = np.clip(idx, 0, len(self.los) - 1)
        tie = (idx > 0) & self.lo_open[idx] & (x == self.los[idx])
        return idx - tie

    def __call__(self, x: np.ndarray) -> np.ndarray:
        idx = self.index(x)
        if self.all_affine:
            y = self.slope[idx] * x + self.offset[idx]
        else:
            y = np.empty_like(x)
            for k, p in enumerate(self.pieces):
                mask = idx == k
                if mask.any():
                    y[mask] = p.forward(x[mask])
        return np.clip(y, 0.0, 1.0)

    def scalar(self):
        """A fast pure-Python scalar evaluator for long single orbits."""
        los = [float(v) for v in self.los]
        lo_open = [bool(v) for v in self.lo_open]
        if self.all_affine:
            coef = [(float(s), float(o)) for s, o in zip(self.slope, self.offset)]

            def step(x):
                k = bisect_right(los, x) - 1
                if k > 0 and lo_open[k] and x == los[k]:
                    k -= 1
                s, o = coef[k]
                y = s * x + o
                return 0.0 if y < 0.0 else (1.0 if y > 1.0 else y)

            return step
        g = self.g
        return lambda x: g(x)


@dataclass
class UlamModel:
    bins: int
    matrix: sparse.csr_matrix
    density: np.ndarray  # stationary mass per bin, sums to 1
    residual: float
    sweeps: int

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.bins + 1)

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def to_records(self) -> list[dict]:
        e = self.edges
        return [{"lo": float(e[k]), "hi": float(e[k + 1]), "mass": float(m)} for k, m in enumerate(self.density)]


def ulam_matrix(g: ExpandingMap, bins: int) -> sparse.csr_matrix:
    """Row-stochastic matrix ``P[k, l] = |bin_k & g^{-1}(bin_l)| / |bin_k|``."""
    if bins < 2:
        raise ValueError("need at least 2 bins")
    g = as_float(g)
    edges = np.linspace(0.0, 1.0, bins + 1)
    rows, cols, vals = [], [], []
    for p in g.pieces:
        lo, hi = float(p.interval.lo), float(p.interval.hi)
        if hi <= lo:
            continue
        inner = edges[(edges > lo) & (edges < hi)]
        pre = np.asarray(p.backward(edges), dtype=float)
        pre = pre[(pre > lo) & (pre < hi)]
        cuts = np.unique(np.concatenate(([lo, hi], inner, pre)))
        seg_lo, seg_hi = cuts[:-1], cuts[1:]
        length = seg_hi - seg_lo
        keep = length > 0
        seg_lo, seg_hi, length = seg_lo[keep], seg_hi[keep], length[keep]
        mid = 0.5 * (seg_lo + seg_hi)
        src = np.minimum((mid * bins).astype(int), bins - 1)
        img = np.asarray(p.forward(mid), dtype=float)
        dst = np.clip((img * bins).astype(int), 0, bins - 1)
        rows.append(src)
        cols.append(dst)
        vals.append(length * bins)
    P = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(bins, bins)
    )
    return P.tocsr()


def stationary_density(P: sparse.csr_matrix, tol: float = 1e-10, max_sweeps: int = 100_000):
    """Left fixed vector of ``P`` by power iteration, stopping at L1 residual ``tol``."""
    n = P.shape[0]
    rho = np.full(n, 1.0 / n)
    PT = P.T.tocsr()
    for sweep in range(1, max_sweeps + 1):
        nxt = PT @ rho
        nxt /= nxt.sum()
        residual = float(np.abs(nxt - rho).sum())
        rho = nxt
        if residual <= tol:
            return rho, float(np.abs(PT @ rho - rho).sum()), sweep
    raise NumericalError(f"power iteration did not reach residual {tol} in {max_sweeps} sweeps")


def ulam_model(g: ExpandingMap, bins: int, tol: float = 1e-10) -> UlamModel:
    P = ulam_matrix(g, bins)
    rho, residual, sweeps = stationary_density(P, tol)
    return UlamModel(bins, P, rho, residual, sweeps)


def g_orbit_float(g: ExpandingMap, x, steps: int) -> np.ndarray:
    """``steps + 1`` double-precision iterates of ``g`` starting at ``x``."""
    step = VectorMap(g).scalar()
    out = np.empty(steps + 1)
    y = float(x)
    out[0] = y
    for k in range(1, steps + 1):
        y = step(y)
        out[k] = y
    return out


def max_gap(points) -> float:
    """Largest gap left in [0, 1] by a finite point set, boundary gaps included."""
    pts = np.sort(np.asarray(points, dtype=float))
    return float(np.diff(np.concatenate(([0.0], pts, [1.0]))).max())


def orbit_density_gap(g: ExpandingMap, x, steps: int) -> float:
    """Largest empty gap in [0, 1] left by ``x, g(x), ..., g^M(x)``."""
    if steps < 1:
        raise ValueError("M must be at least 1")
    return max_gap(g_orbit_float(g, x, steps))


def orbit_density_gaps(g: ExpandingMap, seeds, steps: int) -> np.ndarray:
    """:func:`orbit_density_gap` for many seeds at once, iterating them in lockstep."""
    vm = VectorMap(g)
    x = np.asarray(seeds, dtype=float).copy()
    orbit = np.empty((steps + 1, x.size))
    orbit[0] = x
    for k in range(1, steps + 1):
        x = vm(x)
        orbit[k] = x
    orbit.sort(axis=0)
    padded = np.vstack([np.zeros(x.size), orbit, np.ones(x.size)])
    return np.diff(padded, axis=0).max(axis=0)


def pushforward_histogram(g: ExpandingMap, x, steps: int, bins: int, burn_in: int = 1000) -> np.ndarray:
    """Normalised histogram of ``steps`` iterates after ``burn_in``."""
    orbit = g_orbit_float(g, x, burn_in + steps)[burn_in + 1 :]
    counts, _ = np.histogram(orbit, bins=bins, range=(0.0, 1.0))
    return counts / counts.sum()


def total_variation(p, q) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def expansion_audit(g: ExpandingMap, probes: int = 1000, h: float = 1e-7) -> dict:
    """Smallest central-difference slope magnitude over interior probes of each piece."""
    gf = as_float(g)
    out = {}
    for p in gf.pieces:
        lo, hi = float(p.interval.lo), float(p.interval.hi)
        pad = max(2 * h, 1e-9)
        xs = np.linspace(lo + pad, hi - pad, probes)
        slopes = np.abs((p.forward(xs + h) - p.forward(xs - h)) / (2 * h))
        out[p.label] = float(slopes.min())
    return out
