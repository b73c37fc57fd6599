"""Cauchy-Pompeiu solvers for dbar u = Psi and d u = Psi with Dirichlet data.

    u(z) = 1/(2 pi i) int_{circle} g(zeta)/(zeta - z) dzeta - 1/pi iint_D Psi(zeta)/(zeta - z) dA.

The contour term is the holomorphic projection sum_{k>=0} c_k z^k of the
trigonometric interpolant of g. The area term treats Psi as constant on the
grid cell around each node and integrates the kernel exactly: cells inside
the disk use a closed-form rectangle integral (applied as an FFT
convolution on the grid), cells cut by the circle use Gauss quadrature on
cell-and-disk, refined when the target point is close.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve

from ._fourier import cauchy_projection
from ._kernels import cut_cell_sum
from .grid import GridSpec, extend_outward

DBAR, D = "dbar", "d"
_COARSE = (4, 1)   # Gauss order, subdivisions per piece
_FINE = (6, 4)
_NEAR_CELLS = 4.0  # fine rule within this many h of a cut cell centre
_FAR_CELLS = 32.0  # centroid rule beyond this many h
_BOUNDARY_SAMPLES = 1024


def _corner_antiderivative(x, y):
    """F with d^2F/dx dy = 1/(x + i y)."""
    r2 = x * x + y * y
    lg = np.log(np.where(r2 > 0, r2, 1.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        ax = np.where(x != 0, x * np.arctan(y / np.where(x != 0, x, 1.0)), 0.0)
        ay = np.where(y != 0, y * np.arctan(x / np.where(y != 0, y, 1.0)), 0.0)
    phi1 = 0.5 * y * lg - y + ax
    phi2 = 0.5 * x * lg - x + ay
    return phi1 - 1j * phi2


def rectangle_kernel(x0, x1, y0, y1):
    """iint_{[x0,x1]x[y0,y1]} 1/(x + i y) dx dy, exact (origin may lie inside)."""
    F = _corner_antiderivative
    return F(x1, y1) - F(x0, y1) - F(x1, y0) + F(x0, y0)


@lru_cache(maxsize=8)
def _cell_table(n: int) -> np.ndarray:
    """T[a, b] = iint over the cell centred at offset (a, b) - (n-1) of 1/zeta, unit spacing."""
    k = np.arange(-(n - 1), n, dtype=float)
    A, B = np.meshgrid(k, k, indexing="ij")
    T = rectangle_kernel(A - 0.5, A + 0.5, B - 0.5, B + 0.5)
    T[n - 1, n - 1] = 0.0
    return T


def _gauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _cut_cell_rule(x0, x1, y0, y1, order, sub):
    """Points and weights for the intersection of a rectangle with the unit disk."""
    swap = abs(0.5 * (x0 + x1)) > abs(0.5 * (y0 + y1))
    if swap:
        x0, x1, y0, y1 = y0, y1, x0, x1
    s0, s1 = max(x0, -1.0), min(x1, 1.0)
    if s1 <= s0:
        return np.zeros(0, complex), np.zeros(0)
    brk = {s0, s1}
    for t in (y0, y1):
        if abs(t) < 1.0:
            r = math.sqrt(1.0 - t * t)
            for c in (-r, r):
                if s0 < c < s1:
                    brk.add(c)
    brk = sorted(brk)
    gx, gw = _gauss(order)
    pts, wts = [], []
    for a, b in zip(brk[:-1], brk[1:]):
        edges = np.linspace(a, b, sub + 1)
        for ea, eb in zip(edges[:-1], edges[1:]):
            s = 0.5 * (ea + eb) + 0.5 * (eb - ea) * gx
            ws = 0.5 * (eb - ea) * gw
            half = np.sqrt(np.clip(1.0 - s * s, 0.0, None))
            lo = np.maximum(y0, -half)
            hi = np.minimum(y1, half)
            for si, wsi, l, h in zip(s, ws, lo, hi):
                if h <= l:
                    continue
                tedges = np.linspace(l, h, sub + 1)
                for ta, tb in zip(tedges[:-1], tedges[1:]):
                    t = 0.5 * (ta + tb) + 0.5 * (tb - ta) * gx
                    wt = 0.5 * (tb - ta) * gw * wsi
                    p = (t + 1j * si) if swap else (si + 1j * t)
                    pts.append(p)
                    wts.append(wt)
    if not pts:
        return np.zeros(0, complex), np.zeros(0)
    return np.concatenate(pts), np.concatenate(wts)


@dataclass(frozen=True)
class _CellGeometry:
    full: np.ndarray      # bool mask of nodes whose cell lies inside the disk
    cut_nodes: np.ndarray  # (k, 2) node indices of cells cut by the circle
    centers: np.ndarray    # complex cell centres of cut cells
    centroid: np.ndarray   # centroids of cell-and-disk
    area: np.ndarray
    coarse: tuple          # (points, weights, ptr)
    fine: tuple


def _pack(rules):
    ptr = np.zeros(len(rules) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([r[0].size for r in rules])
    pts = np.concatenate([r[0] for r in rules]) if rules else np.zeros(0, complex)
    wts = np.concatenate([r[1] for r in rules]) if rules else np.zeros(0)
    return pts.astype(complex), wts.astype(float), ptr


@lru_cache(maxsize=8)
def _geometry(grid: GridSpec) -> _CellGeometry:
    h = grid.h
    x1, x2 = grid.mesh
    ax, ay = np.abs(x1) + 0.5 * h, np.abs(x2) + 0.5 * h
    full = ax * ax + ay * ay < 1.0
    # nearest point of the cell to the origin
    nx = np.maximum(np.abs(x1) - 0.5 * h, 0.0)
    ny = np.maximum(np.abs(x2) - 0.5 * h, 0.0)
    touches = nx * nx + ny * ny < 1.0
    cut = touches & ~full
    idx = np.argwhere(cut)
    coarse, fine = [], []
    for i, j in idx:
        cx, cy = grid.coords[i], grid.coords[j]
        box = (cx - 0.5 * h, cx + 0.5 * h, cy - 0.5 * h, cy + 0.5 * h)
        coarse.append(_cut_cell_rule(*box, *_COARSE))
        fine.append(_cut_cell_rule(*box, *_FINE))
    centers = grid.z[idx[:, 0], idx[:, 1]] if idx.size else np.zeros(0, complex)
    area = np.array([w.sum() for _, w in fine])
    centroid = np.array([(p @ w) / w.sum() if w.sum() > 0 else 0j for p, w in fine], dtype=complex)
    return _CellGeometry(full, idx, centers, centroid, area, _pack(coarse), _pack(fine))


def _boundary_array(g, M: int = _BOUNDARY_SAMPLES) -> np.ndarray:
    if g is None:
        return np.zeros(M, dtype=complex)
    if callable(g):
        beta = 2.0 * math.pi * np.arange(M) / M
        return np.asarray(g(np.exp(1j * beta)), dtype=complex) * np.ones(M)
    g = np.asarray(g, dtype=complex)
    if g.ndim == 0:
        return np.full(M, g.item())
    return g


@dataclass
class PompeiuProblem:
    """Source ``psi`` on ``grid`` nodes and boundary data ``g``.

    ``g`` is either equispaced samples on the circle (beta_m = 2 pi m / M), a
    callable of the complex boundary point, a constant, or None for zero data.
    """

    psi: np.ndarray
    g: object
    grid: GridSpec
    kind: str = DBAR

    def __post_init__(self):
        if self.kind not in (DBAR, D):
            raise ValueError(f"kind must be '{DBAR}' or '{D}'")
        self.psi = np.asarray(self.psi, dtype=complex)
        if self.psi.shape != (self.grid.n, self.grid.n):
            raise ValueError("psi must be sampled on the grid")
        if not np.all(np.isfinite(self.psi[self.grid.inside])):
            raise ValueError("psi has non-finite interior values")
        self.g = _boundary_array(self.g)
        if not np.all(np.isfinite(self.g)):
            raise ValueError("boundary data g has non-finite values")

    def conjugate(self) -> "PompeiuProblem":
        kind = D if self.kind == DBAR else DBAR
        return PompeiuProblem(np.conj(self.psi), np.conj(self.g), self.grid, kind)


def _cell_values(psi: np.ndarray, grid: GridSpec) -> np.ndarray:
    return extend_outward(np.where(grid.inside, psi, 0.0), grid, layers=2)


def _cut_contribution(vals, geo: _CellGeometry, grid: GridSpec, z: np.ndarray) -> np.ndarray:
    out = np.zeros(z.size, dtype=complex)
    if geo.cut_nodes.size == 0:
        return out
    cv = vals[geo.cut_nodes[:, 0], geo.cut_nodes[:, 1]].astype(complex)
    cp, cw, cptr = geo.coarse
    fp, fw, fptr = geo.fine
    cut_cell_sum(np.ascontiguousarray(z.ravel()), geo.centers, cv, geo.centroid, geo.area,
                 cp, cw, cptr, fp, fw, fptr, _NEAR_CELLS * grid.h, _FAR_CELLS * grid.h, out)
    return out


def area_integral_grid(psi: np.ndarray, grid: GridSpec) -> np.ndarray:
    """iint_D Psi(zeta)/(zeta - z) dA at every grid node (zero outside the disk)."""
    geo = _geometry(grid)
    vals = _cell_values(psi, grid)
    n = grid.n
    T = _cell_table(n) * grid.h
    # A[p] = sum_q vals[q] T[q - p]: convolve with the reflected table
    full = np.where(geo.full, vals, 0.0)
    conv = fftconvolve(full, T[::-1, ::-1], mode="full")[n - 1:2 * n - 1, n - 1:2 * n - 1]
    ins = grid.inside
    out = np.zeros((n, n), dtype=complex)
    out[ins] = conv[ins] + _cut_contribution(vals, geo, grid, grid.z[ins])
    return out


def area_integral_points(psi: np.ndarray, grid: GridSpec, z) -> np.ndarray:
    """iint_D Psi(zeta)/(zeta - z) dA at arbitrary interior points."""
    geo = _geometry(grid)
    vals = _cell_values(psi, grid)
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    h = grid.h
    fi, fj = np.nonzero(geo.full)
    fv = vals[fi, fj]
    fc = grid.z[fi, fj]
    out = np.empty(zz.size, dtype=complex)
    for k, zp in enumerate(zz.ravel()):
        rel = fc - zp
        I = rectangle_kernel(rel.real - 0.5 * h, rel.real + 0.5 * h, rel.imag - 0.5 * h, rel.imag + 0.5 * h)
        out[k] = fv @ I
    out += _cut_contribution(vals, geo, grid, zz.ravel())
    return out.reshape(np.shape(z))


def _check_guard(z, delta_b):
    if np.any(np.abs(z) > 1.0 - delta_b):
        raise ValueError(f"evaluation point inside the guard band of width {delta_b}")


def solve_dbar_pompeiu(p: PompeiuProblem, z, delta_b: float | None = None):
    """u(z) for dbar u = Psi, u = g on the circle, at interior point(s) ``z``."""
    if p.kind != DBAR:
        raise ValueError("problem kind must be 'dbar'")
    delta_b = 2.0 * p.grid.h if delta_b is None else delta_b
    z = np.asarray(z, dtype=complex)
    _check_guard(z, delta_b)
    res = cauchy_projection(p.g, z) - area_integral_points(p.psi, p.grid, z) / math.pi
    return complex(res) if res.ndim == 0 else res


def solve_d_pompeiu(p: PompeiuProblem, z, delta_b: float | None = None):
    """u(z) for d u = Psi, u = g on the circle; conjugate of the dbar solver on conjugated data."""
    if p.kind != D:
        raise ValueError("problem kind must be 'd'")
    return np.conj(solve_dbar_pompeiu(p.conjugate(), z, delta_b))


def solve_dbar_grid(p: PompeiuProblem) -> np.ndarray:
    """Pompeiu solution of the dbar problem at every inside node (zero outside).

    Accuracy is certified only away from the circle; values in the guard band
    are returned for use by one-sided stencils.
    """
    if p.kind != DBAR:
        raise ValueError("problem kind must be 'dbar'")
    grid = p.grid
    ins = grid.inside
    out = np.zeros((grid.n, grid.n), dtype=complex)
    out[ins] = cauchy_projection(p.g, grid.z[ins])
    out -= area_integral_grid(p.psi, grid) / math.pi
    return out


def solve_d_grid(p: PompeiuProblem) -> np.ndarray:
    if p.kind != D:
        raise ValueError("problem kind must be 'd'")
    return np.conj(solve_dbar_grid(p.conjugate()))
