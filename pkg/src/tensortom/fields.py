"""Symmetric 2-tensor fields on the grid, their angular modes, and bump phantoms.

A field is anything exposing ``evaluate(x1, x2) -> (f11, f12, f22)`` and a
``support_radius``; grid-sampled fields interpolate bilinearly, phantoms
evaluate in closed form.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import Direction
from .grid import GridSpec, partial_x1, partial_x2

INCOMPRESSIBLE = "incompressible"
TRACEFREE = "tracefree"
KINDS = (INCOMPRESSIBLE, TRACEFREE)


class PhantomError(ValueError):
    """Invalid phantom configuration."""


def _bilinear(values: np.ndarray, grid: GridSpec, x1, x2) -> np.ndarray:
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    h = grid.h
    n = grid.n
    t1 = (x1 + 1.0) / h
    t2 = (x2 + 1.0) / h
    i = np.clip(np.floor(t1).astype(np.int64), 0, n - 2)
    j = np.clip(np.floor(t2).astype(np.int64), 0, n - 2)
    a = t1 - i
    b = t2 - j
    out = ((1 - a) * (1 - b) * values[i, j] + a * (1 - b) * values[i + 1, j]
           + (1 - a) * b * values[i, j + 1] + a * b * values[i + 1, j + 1])
    outside = (x1 * x1 + x2 * x2 >= 1.0) | (t1 < 0) | (t1 > n - 1) | (t2 < 0) | (t2 > n - 1)
    return np.where(outside, 0.0, out)


@dataclass
class TensorField:
    """Grid samples of (f11, f12, f22); zero on and outside the unit circle."""

    grid: GridSpec
    f11: np.ndarray
    f12: np.ndarray
    f22: np.ndarray

    def __post_init__(self):
        shape = (self.grid.n, self.grid.n)
        for name in ("f11", "f12", "f22"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.shape != shape:
                raise ValueError(f"{name} has shape {a.shape}, expected {shape}")
            if not np.all(np.isfinite(a)):
                raise ValueError(f"{name} contains non-finite values")
            setattr(self, name, np.where(self.grid.inside, a, 0.0))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "TensorField":
        z = np.zeros((grid.n, grid.n))
        return cls(grid, z, z.copy(), z.copy())

    @property
    def components(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.f11, self.f12, self.f22

    @property
    def trace(self) -> np.ndarray:
        return self.f11 + self.f22

    @property
    def support_radius(self) -> float:
        nz = (self.f11 != 0) | (self.f12 != 0) | (self.f22 != 0)
        if not nz.any():
            return 0.0
        return min(1.0, float(self.grid.radius[nz].max()) + math.sqrt(2.0) * self.grid.h)

    def evaluate(self, x1, x2):
        return tuple(_bilinear(c, self.grid, x1, x2) for c in self.components)

    def scaled(self, c: float) -> "TensorField":
        return TensorField(self.grid, c * self.f11, c * self.f12, c * self.f22)


@dataclass
class AnalyticTensorField:
    """Field given by a callable ``fn(x1, x2) -> (f11, f12, f22)``, cut off at ``support_radius``."""

    fn: Callable
    support_radius: float = 1.0

    def evaluate(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        inside = x1 * x1 + x2 * x2 <= self.support_radius ** 2
        return tuple(np.where(inside, np.broadcast_to(c, inside.shape), 0.0)
                     for c in self.fn(x1, x2))

    def sample(self, grid: GridSpec) -> TensorField:
        x1, x2 = grid.mesh
        return TensorField(grid, *self.evaluate(x1, x2))


def constant_field(f11: float, f12: float, f22: float, support_radius: float = 1.0) -> AnalyticTensorField:
    """Constant tensor on the closed disk of the given radius (test fields)."""
    return AnalyticTensorField(
        lambda x1, x2: (np.full(np.shape(x1), f11), np.full(np.shape(x1), f12), np.full(np.shape(x1), f22)),
        support_radius,
    )


@dataclass
class ModePair:
    """Angular modes f0 (real) and f2 (complex) of <F theta, theta>."""

    grid: GridSpec
    f0: np.ndarray
    f2: np.ndarray


def modes_from_tensor(F: TensorField) -> ModePair:
    f0 = 0.5 * (F.f11 + F.f22)
    f2 = 0.25 * (F.f11 - F.f22) + 0.5j * F.f12
    return ModePair(F.grid, f0, f2)


def tensor_from_modes(m: ModePair) -> TensorField:
    f0 = np.real(m.f0)
    f2 = np.asarray(m.f2, dtype=complex)
    return TensorField(m.grid, f0 + 2.0 * f2.real, 2.0 * f2.imag, f0 - 2.0 * f2.real)


def divergence(F: TensorField) -> tuple[np.ndarray, np.ndarray]:
    """Row divergence (d1 f11 + d2 f12, d1 f12 + d2 f22) by finite differences."""
    g = F.grid
    return (partial_x1(F.f11, g) + partial_x2(F.f12, g),
            partial_x1(F.f12, g) + partial_x2(F.f22, g))


def quadratic_form(f11, f12, f22, c, s):
    """<F theta, theta> for theta = (c, s)."""
    return f11 * c * c + 2.0 * f12 * c * s + f22 * s * s


def project_direction(F, x, d: Direction) -> float:
    """<F(x) theta, theta> with F interpolated at ``x``; 0 outside the disk."""
    x1, x2 = float(x[0]), float(x[1])
    if x1 * x1 + x2 * x2 > 1.0:
        return 0.0
    f11, f12, f22 = (float(np.asarray(v)) for v in F.evaluate(np.array(x1), np.array(x2)))
    return quadratic_form(f11, f12, f22, math.cos(d.phi), math.sin(d.phi))


def mode_expansion(f0, f2, phi):
    """f0 + conj(f2) e^{2i phi} + f2 e^{-2i phi} (real by construction)."""
    e = np.exp(2j * np.asarray(phi))
    return np.real(f0 + np.conj(f2) * e + f2 * np.conj(e))


# --- phantoms ---------------------------------------------------------------

@dataclass(frozen=True)
class Bump:
    cx: float
    cy: float
    r: float
    A: float
    B: float = 0.0


@dataclass
class PhantomSpec:
    """Bump phantom description.

    For ``incompressible`` the bumps form a scalar potential psi and
    F = (d22 psi, -d12 psi; -d12 psi, d11 psi). For ``tracefree`` the bumps
    give f11 = -f22 = sum A b and f12 = sum B b. ``power`` is the bump exponent.
    """

    kind: str
    bumps: list[Bump] = field(default_factory=list)
    r_max: float = 0.9
    power: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PhantomError(f"unknown phantom kind {self.kind!r}")
        if not 0.0 < self.r_max < 1.0:
            raise PhantomError(f"r_max must lie in (0, 1), got {self.r_max}")
        self.bumps = [b if isinstance(b, Bump) else _bump_from_json(b) for b in self.bumps]
        if self.power is None:
            self.power = 5 if self.kind == INCOMPRESSIBLE else 4
        if self.power < 4:
            raise PhantomError("bump power must be >= 4")
        for b in self.bumps:
            if b.r <= 0:
                raise PhantomError(f"bump radius must be positive: {b}")
            if math.hypot(b.cx, b.cy) + b.r > self.r_max + 1e-12:
                raise PhantomError(f"bump {b} leaks outside r_max={self.r_max}")

    @classmethod
    def from_json(cls, text: str) -> "PhantomSpec":
        data = json.loads(text)
        if not isinstance(data, dict) or "kind" not in data:
            raise PhantomError("phantom config must be an object with a 'kind' field")
        return cls(kind=data["kind"], bumps=list(data.get("bumps", [])),
                   r_max=float(data.get("r_max", 0.9)), power=data.get("power"))

    def to_json(self) -> str:
        return json.dumps({
            "kind": self.kind,
            "bumps": [[b.cx, b.cy, b.r, b.A, b.B] for b in self.bumps],
            "r_max": self.r_max,
            "power": self.power,
        })


def _bump_from_json(b) -> Bump:
    if isinstance(b, dict):
        return Bump(float(b["cx"]), float(b["cy"]), float(b["r"]), float(b["A"]), float(b.get("B", 0.0)))
    vals = [float(v) for v in b]
    if len(vals) not in (4, 5):
        raise PhantomError(f"bump entries need 4 or 5 numbers, got {b!r}")
    return Bump(*vals)


def _bump_profile(b: Bump, power: int, x1, x2, order: int):
    """Profile w^p, w = 1 - |x-c|^2/r^2, and its derivatives up to ``order``.

    Returns a dict keyed by derivative multi-index tuples, e.g. (1, 1) = d12.
    """
    d1 = x1 - b.cx
    d2 = x2 - b.cy
    r2 = b.r * b.r
    w = 1.0 - (d1 * d1 + d2 * d2) / r2
    on = w > 0
    w = np.where(on, w, 0.0)
    p = power

    def wp(k):
        return np.where(on, w ** (p - k), 0.0) if p - k >= 0 else np.zeros_like(w)

    # w_i = -2 d_i / r^2, w_ij = -2 delta_ij / r^2
    g = (-2.0 * d1 / r2, -2.0 * d2 / r2)
    c = -2.0 / r2
    out = {(0, 0): wp(0)}
    if order >= 1:
        out[(1, 0)] = p * wp(1) * g[0]
        out[(0, 1)] = p * wp(1) * g[1]
    if order >= 2:
        k1 = p * (p - 1) * wp(2)
        k0 = p * wp(1)
        out[(2, 0)] = k1 * g[0] ** 2 + k0 * c
        out[(0, 2)] = k1 * g[1] ** 2 + k0 * c
        out[(1, 1)] = k1 * g[0] * g[1]
    if order >= 3:
        k2 = p * (p - 1) * (p - 2) * wp(3)
        k1 = p * (p - 1) * wp(2)
        out[(3, 0)] = k2 * g[0] ** 3 + 3 * k1 * g[0] * c
        out[(0, 3)] = k2 * g[1] ** 3 + 3 * k1 * g[1] * c
        out[(2, 1)] = k2 * g[0] ** 2 * g[1] + k1 * g[1] * c
        out[(1, 2)] = k2 * g[0] * g[1] ** 2 + k1 * g[0] * c
    return out


@dataclass
class BumpPhantom:
    """Closed-form phantom; ``evaluate`` gives the exact tensor components."""

    spec: PhantomSpec

    @property
    def support_radius(self) -> float:
        return self.spec.r_max

    @property
    def kind(self) -> str:
        return self.spec.kind

    def potential_derivatives(self, x1, x2, order: int = 2) -> dict:
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        acc: dict = {}
        for b in self.spec.bumps:
            for key, v in _bump_profile(b, self.spec.power, x1, x2, order).items():
                acc[key] = acc.get(key, 0.0) + b.A * v
        if not acc:
            z = np.zeros(np.broadcast(x1, x2).shape)
            return {k: z for k in ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))}
        return acc

    def evaluate(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        shape = np.broadcast(x1, x2).shape
        if self.spec.kind == INCOMPRESSIBLE:
            d = self.potential_derivatives(x1, x2, 2)
            return (np.broadcast_to(d[(0, 2)], shape).copy(),
                    np.broadcast_to(-d[(1, 1)], shape).copy(),
                    np.broadcast_to(d[(2, 0)], shape).copy())
        p = np.zeros(shape)
        q = np.zeros(shape)
        for b in self.spec.bumps:
            prof = _bump_profile(b, self.spec.power, x1, x2, 0)[(0, 0)]
            p = p + b.A * prof
            q = q + b.B * prof
        return p, q, -p

    def sample(self, grid: GridSpec) -> TensorField:
        x1, x2 = grid.mesh
        return TensorField(grid, *self.evaluate(x1, x2))


def phantom_incompressible(spec: PhantomSpec, grid: GridSpec) -> TensorField:
    if spec.kind != INCOMPRESSIBLE:
        raise PhantomError(f"expected an incompressible spec, got {spec.kind!r}")
    return BumpPhantom(spec).sample(grid)


def phantom_tracefree(spec: PhantomSpec, grid: GridSpec) -> TensorField:
    if spec.kind != TRACEFREE:
        raise PhantomError(f"expected a tracefree spec, got {spec.kind!r}")
    return BumpPhantom(spec).sample(grid)


def default_phantom(kind: str) -> PhantomSpec:
    """Two-bump phantom used by the round-trip checks and the CLI defaults.

    Wide bumps keep the angular modes of the boundary data decaying fast, so
    truncation at N = 32 is harmless.
    """
    if kind == INCOMPRESSIBLE:
        bumps = [Bump(0.07, 0.04, 0.75, 0.1), Bump(-0.1, -0.07, 0.7, 0.06)]
        return PhantomSpec(kind, bumps, r_max=0.85, power=5)
    bumps = [Bump(0.1, 0.05, 0.7, 1.0, 0.5), Bump(-0.15, -0.1, 0.6, -0.5, 0.8)]
    return PhantomSpec(kind, bumps, r_max=0.85, power=4)
