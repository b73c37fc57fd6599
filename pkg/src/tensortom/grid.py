"""Cartesian grid on [-1, 1]^2 and finite-difference derivatives on the disk.

Arrays are indexed ``a[i, j] = a(x1_i, x2_j)`` (``ij`` indexing). Derivatives
are centered where both neighbours are inside the open disk and fall back to
second-order one-sided stencils at the disk edge, so that only inside values
are ever read.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

INSIDE_TOL = 1e-14

OUTSIDE, BAND, INTERIOR = 0, 1, 2


@dataclass(frozen=True)
class GridSpec:
    """Odd number ``n`` of nodes per side covering [-1, 1]^2."""

    n: int = 257

    def __post_init__(self):
        if self.n < 33 or self.n % 2 == 0:
            raise ValueError(f"grid size must be odd and >= 33, got {self.n}")

    @property
    def h(self) -> float:
        return 2.0 / (self.n - 1)

    @cached_property
    def coords(self) -> np.ndarray:
        c = np.linspace(-1.0, 1.0, self.n)
        c[(self.n - 1) // 2] = 0.0
        return c

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.coords, self.coords, indexing="ij")

    @cached_property
    def z(self) -> np.ndarray:
        x1, x2 = self.mesh
        return x1 + 1j * x2

    @cached_property
    def radius(self) -> np.ndarray:
        return np.abs(self.z)

    @cached_property
    def inside(self) -> np.ndarray:
        """Nodes strictly inside the unit circle."""
        x1, x2 = self.mesh
        return x1 * x1 + x2 * x2 < 1.0 - INSIDE_TOL

    @cached_property
    def mask(self) -> np.ndarray:
        """Node classification: INTERIOR, BAND (inside, with an 8-neighbour outside) or OUTSIDE."""
        ins = self.inside
        padded = np.pad(ins, 1, constant_values=False)
        all_nb = np.ones_like(ins)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                all_nb &= padded[1 + di:1 + di + self.n, 1 + dj:1 + dj + self.n]
        m = np.full(ins.shape, OUTSIDE, dtype=np.int8)
        m[ins] = BAND
        m[all_nb] = INTERIOR
        return m

    def certified(self, delta_b: float | None = None) -> np.ndarray:
        """Inside nodes at distance >= ``delta_b`` (default 2h) from the circle."""
        if delta_b is None:
            delta_b = 2.0 * self.h
        return self.inside & (self.radius <= 1.0 - delta_b)

    def nearest_index(self, x: float) -> int:
        return int(round((x + 1.0) / self.h))


def _five_point_weights(lo: int) -> np.ndarray:
    """First-derivative weights on offsets lo..lo+4 (unit spacing)."""
    offs = np.arange(lo, lo + 5, dtype=float)
    V = np.vander(offs, 5, increasing=True).T
    rhs = np.zeros(5)
    rhs[1] = 1.0
    return np.linalg.solve(V, rhs)


_FIVE_POINT = {lo: _five_point_weights(lo) for lo in (-4, -3, -2, -1, 0)}


def _axis_derivative(f: np.ndarray, inside: np.ndarray, h: float, axis: int, order: int = 2) -> np.ndarray:
    f = np.where(inside, f, 0)
    sl = [slice(None)] * 2

    def shifted(a, k, fill):
        out = np.full_like(a, fill)
        src = list(sl)
        dst = list(sl)
        if k > 0:
            src[axis] = slice(k, None)
            dst[axis] = slice(None, -k)
        else:
            src[axis] = slice(None, k)
            dst[axis] = slice(-k, None)
        out[tuple(dst)] = a[tuple(src)]
        return out

    fp, ip = shifted(f, 1, 0), shifted(inside, 1, False)
    fm, im = shifted(f, -1, 0), shifted(inside, -1, False)
    fp2 = shifted(f, 2, 0)
    fm2 = shifted(f, -2, 0)
    d = (fp - fm) / (2.0 * h)
    fwd = (-3.0 * f + 4.0 * fp - fp2) / (2.0 * h)
    bwd = (3.0 * f - 4.0 * fm + fm2) / (2.0 * h)
    d = np.where(ip & im, d, np.where(ip, fwd, bwd))
    if order == 4:
        # most centered five-point window lying inside, applied in reverse so
        # the centered one wins
        for lo in (-4, 0, -3, -1, -2):
            offs = range(lo, lo + 5)
            ok = np.ones_like(inside)
            acc = np.zeros_like(d)
            for k, w in zip(offs, _FIVE_POINT[lo]):
                ok &= shifted(inside, k, False) if k else inside
                acc = acc + w * (shifted(f, k, 0) if k else f)
            d = np.where(ok, acc / h, d)
    elif order != 2:
        raise ValueError("order must be 2 or 4")
    return np.where(inside, d, 0)


def partial_x1(f: np.ndarray, grid: GridSpec, inside: np.ndarray | None = None, order: int = 2) -> np.ndarray:
    """d/dx1 on inside nodes; zero elsewhere.

    ``order=4`` uses the most centered five-point stencil that fits inside
    the disk and the second-order stencils where none does.
    """
    return _axis_derivative(np.asarray(f), grid.inside if inside is None else inside, grid.h, 0, order)


def partial_x2(f: np.ndarray, grid: GridSpec, inside: np.ndarray | None = None, order: int = 2) -> np.ndarray:
    return _axis_derivative(np.asarray(f), grid.inside if inside is None else inside, grid.h, 1, order)


def extend_outward(f: np.ndarray, grid: GridSpec, layers: int = 2) -> np.ndarray:
    """Fill outside nodes next to the disk with the value of an inside neighbour.

    Each layer copies, for every still-empty node, the first filled neighbour
    found toward the centre. Used to give partially covered cells a value.
    """
    out = np.where(grid.inside, f, 0).astype(np.result_type(f, float))
    filled = grid.inside.copy()
    n = grid.n
    for _ in range(layers):
        new_out = out.copy()
        new_filled = filled.copy()
        idx = np.argwhere(~filled)
        for i, j in idx:
            x1, x2 = grid.coords[i], grid.coords[j]
            si = -int(np.sign(x1)) if abs(x1) > 0 else 0
            sj = -int(np.sign(x2)) if abs(x2) > 0 else 0
            for di, dj in ((si, sj), (si, 0), (0, sj)):
                if di == 0 and dj == 0:
                    continue
                a, b = i + di, j + dj
                if 0 <= a < n and 0 <= b < n and filled[a, b]:
                    new_out[i, j] = out[a, b]
                    new_filled[i, j] = True
                    break
        out, filled = new_out, new_filled
    return out
