"""Cauchy-Riemann derivatives and a Dirichlet solver for the coupled operator

    P(D) u = (Delta u1 + b d1(div u) + C2 u1,  Delta u2 + b d2(div u) + C2 u2),  b = C1 / 4,

on the unit disk, with C1 >= 0 and C2 <= 0.

Second derivatives along the axes and the two diagonals use the three-point
Shortley-Weller formula; a neighbour outside the disk is replaced by the
point where that stencil arm meets the circle, carrying the Dirichlet value.
The mixed derivative is d12 = (d_xixi - d_etaeta) / 2 along the diagonals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ._fourier import trig_eval
from .grid import GridSpec, partial_x1, partial_x2

RESIDUAL_TOL = 1e-10

# stencil arms: (di, dj) and their use
_AXIS1, _AXIS2, _DIAG1, _DIAG2 = (1, 0), (0, 1), (1, 1), (1, -1)


class EllipticError(RuntimeError):
    """Raised when an assembled system is singular or its residual check fails."""


def dbar(f: np.ndarray, grid: GridSpec, order: int = 2) -> np.ndarray:
    """(d/dx1 + i d/dx2) f / 2 on inside nodes."""
    return 0.5 * (partial_x1(f, grid, order=order) + 1j * partial_x2(f, grid, order=order))


def d(f: np.ndarray, grid: GridSpec, order: int = 2) -> np.ndarray:
    """(d/dx1 - i d/dx2) f / 2 on inside nodes."""
    return 0.5 * (partial_x1(f, grid, order=order) - 1j * partial_x2(f, grid, order=order))


def laplacian(f: np.ndarray, grid: GridSpec) -> np.ndarray:
    return 4.0 * d(dbar(f, grid), grid)


def principal_symbol(C1: float, xi) -> np.ndarray:
    """Principal symbol of P(D) at frequency ``xi``: |xi|^2 I + b xi xi^T (up to sign)."""
    xi = np.asarray(xi, dtype=float)
    b = C1 / 4.0
    return float(xi @ xi) * np.eye(2) + b * np.outer(xi, xi)


def boundary_samples(g, betas: np.ndarray) -> np.ndarray:
    """Evaluate Dirichlet data at boundary angles.

    ``g`` may be a scalar, a callable ``g(x1, x2)``, or equispaced samples on
    the circle (trigonometric interpolation).
    """
    betas = np.asarray(betas, dtype=float)
    if g is None:
        return np.zeros(betas.shape)
    if callable(g):
        return np.asarray(g(np.cos(betas), np.sin(betas))) * np.ones(betas.shape)
    g = np.asarray(g)
    if g.ndim == 0:
        return np.full(betas.shape, g.item())
    vals = trig_eval(g, betas)
    return vals.real if np.isrealobj(g) else vals


@dataclass
class EllipticProblem:
    """Data for P(D) u = f, u = g on the circle. ``rhs`` and ``dirichlet`` are pairs."""

    C1: float
    C2: float
    rhs: tuple
    dirichlet: tuple = (None, None)

    def __post_init__(self):
        if self.C1 < 0 or self.C2 > 0:
            raise ValueError(f"P(D) requires C1 >= 0 and C2 <= 0, got C1={self.C1}, C2={self.C2}")
        if len(self.rhs) != 2 or len(self.dirichlet) != 2:
            raise ValueError("rhs and dirichlet must be pairs")


def _arm(grid: GridSpec, ii, jj, di, dj):
    """For inside nodes (ii, jj) and arm (di, dj): neighbour flag, unknown or boundary,
    the arm length, and the boundary angle where the arm is cut."""
    n, h = grid.n, grid.h
    ni, nj = ii + di, jj + dj
    ok = (ni >= 0) & (ni < n) & (nj >= 0) & (nj < n)
    nb_inside = np.zeros(ii.shape, dtype=bool)
    nb_inside[ok] = grid.inside[ni[ok], nj[ok]]
    full = h * math.hypot(di, dj)
    x1 = grid.coords[ii]
    x2 = grid.coords[jj]
    ex, ey = di * h, dj * h
    # |x + t e|^2 = 1 for t in (0, 1]
    a = ex * ex + ey * ey
    bq = 2.0 * (x1 * ex + x2 * ey)
    c = x1 * x1 + x2 * x2 - 1.0
    t = (-bq + np.sqrt(np.maximum(bq * bq - 4.0 * a * c, 0.0))) / (2.0 * a)
    t = np.clip(t, 1e-12, 1.0)
    length = np.where(nb_inside, full, t * full)
    beta = np.arctan2(x2 + t * ey, x1 + t * ex)
    return ni, nj, nb_inside, length, beta


class PDSolver:
    """Factorized Dirichlet solver for P(D) on a grid, reusable across data.

    Unknowns are the inside nodes of both components, ordered (u1, u2). When
    C1 = 0 the components decouple and a single scalar block is factorized.
    """

    def __init__(self, grid: GridSpec, C1: float, C2: float):
        if C1 < 0 or C2 > 0:
            raise ValueError(f"P(D) requires C1 >= 0 and C2 <= 0, got C1={C1}, C2={C2}")
        self.grid = grid
        self.C1 = float(C1)
        self.C2 = float(C2)
        self.b = self.C1 / 4.0
        self.coupled = self.b != 0.0
        ins = grid.inside
        self.ii, self.jj = np.nonzero(ins)
        self.K = self.ii.size
        index = -np.ones((grid.n, grid.n), dtype=np.int64)
        index[self.ii, self.jj] = np.arange(self.K)
        self._index = index
        self._assemble()
        try:
            self._lu = spla.splu(self.A.tocsc())
        except RuntimeError as exc:
            raise EllipticError(f"assembled P(D) matrix is singular: {exc}") from exc

    def _second_derivative(self, di, dj):
        """Entries of the 1-D second difference along arm (di, dj) for all unknowns.

        Returns (rows, cols, vals) for unknown couplings and (rows, bidx, vals)
        for boundary couplings, together with the boundary angles created.
        """
        K = self.K
        rows_u, cols_u, vals_u = [], [], []
        rows_b, vals_b, betas = [], [], []
        arms = []
        for sgn in (1, -1):
            arms.append(_arm(self.grid, self.ii, self.jj, sgn * di, sgn * dj))
        (ni_p, nj_p, in_p, hp, bp), (ni_m, nj_m, in_m, hm, bm) = arms
        cp = 2.0 / ((hp + hm) * hp)
        cm = 2.0 / ((hp + hm) * hm)
        k = np.arange(K)
        rows_u.append(k)
        cols_u.append(k)
        vals_u.append(-(cp + cm))
        for flag, ni, nj, coef, beta in ((in_p, ni_p, nj_p, cp, bp), (in_m, ni_m, nj_m, cm, bm)):
            sel = np.flatnonzero(flag)
            rows_u.append(sel)
            cols_u.append(self._index[ni[sel], nj[sel]])
            vals_u.append(coef[sel])
            sel = np.flatnonzero(~flag)
            rows_b.append(sel)
            vals_b.append(coef[sel])
            betas.append(beta[sel])
        return (np.concatenate(rows_u), np.concatenate(cols_u), np.concatenate(vals_u),
                np.concatenate(rows_b), np.concatenate(vals_b), np.concatenate(betas))

    def _assemble(self):
        K = self.K
        ops = {arm: self._second_derivative(*arm) for arm in (_AXIS1, _AXIS2, _DIAG1, _DIAG2)}
        # boundary points, one per cut arm, collected in a fixed order
        offsets, bet = {}, []
        start = 0
        for arm in (_AXIS1, _AXIS2, _DIAG1, _DIAG2):
            offsets[arm] = start
            bet.append(ops[arm][5])
            start += ops[arm][5].size
        self.boundary_betas = np.concatenate(bet)
        nb = self.boundary_betas.size

        def block(weights):
            """Sum of weighted second differences as (K x K, K x nb) sparse blocks."""
            A = sp.csr_matrix((K, K))
            B = sp.csr_matrix((K, nb))
            for arm, w in weights.items():
                if w == 0.0:
                    continue
                ru, cu, vu, rb, vb, _ = ops[arm]
                A = A + sp.csr_matrix((w * vu, (ru, cu)), shape=(K, K))
                bidx = offsets[arm] + np.arange(rb.size)
                B = B + sp.csr_matrix((w * vb, (rb, bidx)), shape=(K, nb))
            return A, B

        b = self.b
        eye = sp.identity(K, format="csr")
        if not self.coupled:
            A, B = block({_AXIS1: 1.0, _AXIS2: 1.0})
            self.A = (A + self.C2 * eye).tocsr()
            self.Bnd = B.tocsr()
            return
        A11, B11 = block({_AXIS1: 1.0 + b, _AXIS2: 1.0})
        A22, B22 = block({_AXIS1: 1.0, _AXIS2: 1.0 + b})
        A12, B12 = block({_DIAG1: 0.5 * b, _DIAG2: -0.5 * b})
        self.A = sp.bmat([[A11 + self.C2 * eye, A12], [A12, A22 + self.C2 * eye]], format="csr")
        # boundary values enter as (g1 at cut points, g2 at cut points)
        self.Bnd = sp.bmat([[B11, B12], [B12, B22]], format="csr")

    def _gather(self, f: np.ndarray) -> np.ndarray:
        return np.asarray(f, dtype=float)[self.ii, self.jj]

    def _scatter(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros((self.grid.n, self.grid.n))
        out[self.ii, self.jj] = x
        return out

    def _solve_block(self, rhs: np.ndarray) -> np.ndarray:
        x = self._lu.solve(rhs)
        res = np.abs(self.A @ x - rhs).max(initial=0.0)
        scale = max(1.0, float(np.abs(rhs).max(initial=0.0)))
        if not np.all(np.isfinite(x)) or res > RESIDUAL_TOL * scale:
            raise EllipticError(f"P(D) residual {res:.3e} exceeds {RESIDUAL_TOL:.0e} (relative)")
        return x

    def solve(self, f1, f2=None, g1=None, g2=None) -> tuple[np.ndarray, np.ndarray]:
        """Return (u1, u2) on the grid (zero outside the disk)."""
        gb1 = boundary_samples(g1, self.boundary_betas)
        gb2 = boundary_samples(g2, self.boundary_betas)
        if f2 is None:
            f2 = np.zeros((self.grid.n, self.grid.n))
        if self.coupled:
            rhs = np.concatenate([self._gather(f1), self._gather(f2)])
            rhs -= self.Bnd @ np.concatenate([gb1, gb2])
            x = self._solve_block(rhs)
            return self._scatter(x[: self.K]), self._scatter(x[self.K:])
        u1 = self._solve_block(self._gather(f1) - self.Bnd @ gb1)
        if not np.any(f2) and not np.any(gb2):
            return self._scatter(u1), np.zeros_like(f2, dtype=float)
        u2 = self._solve_block(self._gather(f2) - self.Bnd @ gb2)
        return self._scatter(u1), self._scatter(u2)

    def apply(self, u1, u2, g1=None, g2=None) -> tuple[np.ndarray, np.ndarray]:
        """Discrete P(D) applied to grid functions with the given boundary data."""
        gb1 = boundary_samples(g1, self.boundary_betas)
        gb2 = boundary_samples(g2, self.boundary_betas)
        if self.coupled:
            y = self.A @ np.concatenate([self._gather(u1), self._gather(u2)])
            y += self.Bnd @ np.concatenate([gb1, gb2])
            return self._scatter(y[: self.K]), self._scatter(y[self.K:])
        y1 = self.A @ self._gather(u1) + self.Bnd @ gb1
        y2 = self.A @ self._gather(u2) + self.Bnd @ gb2
        return self._scatter(y1), self._scatter(y2)


def solve_pd(problem: EllipticProblem, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    solver = PDSolver(grid, problem.C1, problem.C2)
    return solver.solve(problem.rhs[0], problem.rhs[1], *problem.dirichlet)


def _split_boundary(g):
    if g is None:
        return None, None
    if callable(g):
        return (lambda x1, x2: np.real(g(x1, x2))), (lambda x1, x2: np.imag(g(x1, x2)))
    g = np.asarray(g)
    return g.real.copy(), g.imag.copy()


def incompressible_solver(grid: GridSpec, mu: float) -> PDSolver:
    if mu <= 0:
        raise ValueError("attenuation must be positive")
    return PDSolver(grid, 4.0, -2.0 * mu * mu)


def solve_incompressible_bvp(mu: float, rhs: np.ndarray, g, grid: GridSpec,
                             solver: PDSolver | None = None) -> np.ndarray:
    """Solve Delta u + 4 dbar(Re d u) - 2 mu^2 u = rhs, u = g on the circle, for complex u.

    With u = u1 + i u2 one has 4 dbar(Re d u) = (d1 + i d2)(div(u1, u2)), so the
    real and imaginary parts form P(D) with C1 = 4, C2 = -2 mu^2.
    """
    solver = solver or incompressible_solver(grid, mu)
    rhs = np.asarray(rhs, dtype=complex)
    g1, g2 = _split_boundary(g)
    u1, u2 = solver.solve(rhs.real, rhs.imag, g1, g2)
    return u1 + 1j * u2


def solve_screened_poisson(mu: float, rhs: np.ndarray, g, grid: GridSpec,
                           solver: PDSolver | None = None) -> np.ndarray:
    """Solve Delta u - 2 mu^2 u = rhs with u = g on the circle (real u)."""
    if mu <= 0:
        raise ValueError("attenuation must be positive")
    solver = solver or PDSolver(grid, 0.0, -2.0 * mu * mu)
    u, _ = solver.solve(np.real(rhs), None, g, None)
    return u
