"""Bukhgeim-Cauchy integral for L^2-analytic sequences on the unit disk.

For boundary data v_{-n}(zeta), n = 0..N,

    (B v)_{-n}(z) = 1/(2 pi i) int v_{-n}(zeta) / (zeta - z) dzeta
        + 1/(2 pi i) int {dzeta/(zeta - z) - dconj(zeta)/(conj(zeta) - conj(z))}
              sum_{j>=1} v_{-n-2j}(zeta) ((conj(zeta) - conj(z)) / (zeta - z))^j,

with the j-series truncated at the available modes. On the unit circle the
braced 1-form is 2 Re(zeta / (zeta - z)) dbeta / (2 pi i) * i, so both terms
are real-weighted trapezoid sums in beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._fourier import trig_eval, upsample
from ._kernels import bukhgeim_trapezoid
from .attenuation import ModeSequence
from .elliptic import d, dbar
from .grid import INTERIOR, GridSpec

# trapezoid error ~ exp(-M d) at distance d from the circle
_NODES_PER_INV_DIST = 48.0
MAX_BOUNDARY_SAMPLES = 1 << 16


@dataclass
class BoundarySequence:
    """v[n, m] = v_{-n}(zeta(beta_m)), beta_m = 2 pi m / M."""

    v: np.ndarray

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=complex)
        if self.v.ndim != 2:
            raise ValueError("boundary sequence must be a 2-D array (modes, samples)")
        if not np.all(np.isfinite(self.v)):
            raise ValueError("boundary sequence contains non-finite values")

    @property
    def N(self) -> int:
        return self.v.shape[0] - 1

    @property
    def M(self) -> int:
        return self.v.shape[1]

    @property
    def zeta(self) -> np.ndarray:
        return np.exp(2j * math.pi * np.arange(self.M) / self.M)

    @classmethod
    def from_function(cls, fn, N: int, M: int = 512) -> "BoundarySequence":
        """Sample ``fn(zeta) -> sequence of N+1 arrays`` on the circle."""
        zeta = np.exp(2j * math.pi * np.arange(M) / M)
        vals = fn(zeta)
        v = np.zeros((N + 1, M), dtype=complex)
        for n, vn in enumerate(vals):
            if n > N:
                break
            v[n] = np.broadcast_to(vn, (M,))
        return cls(v)


def _samples_needed(dist: np.ndarray, M: int) -> np.ndarray:
    need = _NODES_PER_INV_DIST / np.maximum(dist, 1e-300)
    levels = np.maximum(M, 2 ** np.ceil(np.log2(np.maximum(need, 1.0))))
    return np.minimum(levels, max(M, MAX_BOUNDARY_SAMPLES)).astype(np.int64)


# closest distance to the circle the capped trapezoid rule resolves
MIN_DISTANCE = _NODES_PER_INV_DIST / MAX_BOUNDARY_SAMPLES


def bukhgeim_evaluate(bv: BoundarySequence, points) -> np.ndarray:
    """(B v)_{-n} at complex ``points`` inside the disk; shape (N+1,) + points.shape.

    Boundary data are upsampled spectrally per point so that the trapezoid
    rule resolves the kernel at the point's distance from the circle. Points
    closer than MIN_DISTANCE are interpolated linearly along the radius
    between the boundary trace and the value at distance MIN_DISTANCE. No
    accuracy guard is applied here.
    """
    pts = np.asarray(points, dtype=complex)
    flat = pts.ravel()
    if np.any(np.abs(flat) >= 1.0):
        raise ValueError("Bukhgeim-Cauchy evaluation requires |z| < 1")
    dist = 1.0 - np.abs(flat)
    close = dist < MIN_DISTANCE
    if close.any():
        out = np.empty((bv.N + 1, flat.size), dtype=complex)
        far = ~close
        if far.any():
            out[:, far] = bukhgeim_evaluate(bv, flat[far])
        direction = flat[close] / np.where(np.abs(flat[close]) > 0, np.abs(flat[close]), 1.0)
        inner = bukhgeim_evaluate(bv, direction * (1.0 - MIN_DISTANCE))
        trace = trig_eval(bv.v, np.angle(direction))
        w = dist[close] / MIN_DISTANCE
        out[:, close] = w * inner + (1.0 - w) * trace
        return out.reshape((bv.N + 1,) + pts.shape)
    out = np.zeros((bv.N + 1, flat.size), dtype=complex)
    levels = _samples_needed(dist, bv.M)
    for L in np.unique(levels):
        idx = np.flatnonzero(levels == L)
        data = upsample(bv.v, int(L)).astype(complex)
        zeta = np.exp(2j * math.pi * np.arange(L) / L)
        res = np.zeros((bv.N + 1, idx.size), dtype=complex)
        bukhgeim_trapezoid(np.ascontiguousarray(flat[idx]), zeta, np.ascontiguousarray(data), res)
        out[:, idx] = res
    return out.reshape((bv.N + 1,) + pts.shape)


def bukhgeim_cauchy(bv: BoundarySequence, z, delta_b: float = 2.0 / 256) -> np.ndarray:
    """Interior value (B v)(z) as a length N+1 array; ``z`` must be at least ``delta_b`` inside."""
    z = complex(z[0], z[1]) if np.ndim(z) == 1 else complex(z)
    if abs(z) > 1.0 - delta_b:
        raise ValueError(f"|z|={abs(z):.6f} lies in the guard band of width {delta_b}")
    return bukhgeim_evaluate(bv, np.array([z]))[:, 0]


def bukhgeim_on_grid(bv: BoundarySequence, grid: GridSpec) -> ModeSequence:
    """Evaluate B v at every inside node; zero elsewhere."""
    vals = np.zeros((bv.N + 1, grid.n, grid.n), dtype=complex)
    ins = grid.inside
    vals[:, ins] = bukhgeim_evaluate(bv, grid.z[ins])
    return ModeSequence(vals)


def aanalytic_residual(v, grid: GridSpec, region: np.ndarray | None = None) -> float:
    """max over ``region`` and n <= N-2 of |dbar v_{-n} + d v_{-n-2}| (centered differences).

    ``region`` defaults to the nodes whose full 3x3 stencil lies inside the disk.
    """
    u = v.u if isinstance(v, ModeSequence) else np.asarray(v)
    if region is None:
        region = grid.mask == INTERIOR
    worst = 0.0
    for n in range(u.shape[0] - 2):
        r = dbar(u[n], grid) + d(u[n + 2], grid)
        if region.any():
            worst = max(worst, float(np.abs(r[region]).max()))
    return worst


def y_alpha_diagnostic(bv: BoundarySequence, alpha: float) -> tuple[float, float]:
    """Truncated Y_alpha norms: weighted l1 sup and the Hoelder-type sup over nearby pairs."""
    if not 0.5 < alpha < 1.0:
        raise ValueError("alpha must lie in (1/2, 1)")
    n = np.arange(bv.N + 1)
    jb = np.sqrt(1.0 + n * n)
    absv = np.abs(bv.v)
    w1 = float((jb[:, None] ** 2 * absv).sum(axis=0).max())
    M = bv.M
    zeta = bv.zeta
    w2 = 0.0
    for shift in range(1, max(1, M // 8) + 1):
        diff = np.abs(bv.v - np.roll(bv.v, -shift, axis=1))
        dist = np.abs(zeta - np.roll(zeta, -shift)) ** alpha
        w2 = max(w2, float(((jb[:, None] * diff).sum(axis=0) / dist).max()))
    return w1, w2
