"""End-to-end inversion of the exponential X-ray transform for incompressible
and trace-free symmetric 2-tensors on the unit disk.

Both pipelines first recover the modes u_{-2}, u_{-3}, ... of the transport
solution inside the disk from the boundary modes g_{-n}: the boundary
sequence e^{-G} L^2 g is L^2-analytic after the e^{-G} conjugation, so the
Bukhgeim-Cauchy integral extends it inside, and e^{G} undoes the conjugation.
The remaining modes u_{-1}, u_0 come from an elliptic boundary value problem
and a Cauchy-Pompeiu formula, and the tensor from

    f0 = 2 Re d u_{-1} + mu u_0,    f2 = dbar u_{-1} + d u_{-3} + mu u_{-2}.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .attenuation import ModeSequence, attenuation_coeffs, conv_eG
from .bukhgeim import BoundarySequence, aanalytic_residual, bukhgeim_on_grid
from .elliptic import (PDSolver, d, dbar, incompressible_solver, solve_incompressible_bvp,
                       solve_screened_poisson)
from .fields import INCOMPRESSIBLE, KINDS, TRACEFREE, ModePair, TensorField, divergence, tensor_from_modes
from .grid import GridSpec
from .pompeiu import D, DBAR, PompeiuProblem, solve_d_grid, solve_dbar_grid
from .transform import BoundaryModes, Sinogram, boundary_modes


# derivative stencil order used to form right-hand sides and the tensor modes
DERIV_ORDER = 4


def _d(f, grid):
    return d(f, grid, DERIV_ORDER)


def _dbar(f, grid):
    return dbar(f, grid, DERIV_ORDER)


class ConfigError(ValueError):
    """Inconsistent reconstruction settings."""


@dataclass
class ReconstructionConfig:
    mu: float = 1.0
    N: int = 32
    grid: GridSpec = field(default_factory=GridSpec)
    n_beta: int = 512
    n_phi: int = 256
    delta_B: float | None = None
    cls: str = INCOMPRESSIBLE

    def __post_init__(self):
        if not self.mu > 0:
            raise ConfigError(f"attenuation mu must be positive, got {self.mu}")
        if self.N < 4:
            raise ConfigError(f"mode truncation N must be >= 4, got {self.N}")
        if self.n_phi < 4 * self.N:
            raise ConfigError(f"n_phi={self.n_phi} must be >= 4N={4 * self.N}")
        if self.N > self.n_phi // 2 - 1:
            raise ConfigError("N exceeds the number of resolved angular modes")
        if self.cls not in KINDS:
            raise ConfigError(f"unknown tensor class {self.cls!r}")
        if self.delta_B is None:
            self.delta_B = 2.0 * self.grid.h
        if not 0.0 < self.delta_B < 0.5:
            raise ConfigError("guard band delta_B must lie in (0, 0.5)")

    @property
    def certified(self) -> np.ndarray:
        return self.grid.certified(self.delta_B)

    def to_dict(self) -> dict:
        return {"mu": self.mu, "N": self.N, "grid_n": self.grid.n, "n_beta": self.n_beta,
                "n_phi": self.n_phi, "delta_B": self.delta_B, "class": self.cls}


@dataclass
class ReconstructionReport:
    """Diagnostics of one inversion. ``timings`` and ``intermediates`` are not part of the JSON."""

    config: dict
    errors: dict = field(default_factory=dict)
    aanalytic_residual: float = 0.0
    pompeiu_residual: float = 0.0
    elliptic_residual: float = 0.0
    mode_decay: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    intermediates: dict = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "errors": self.errors,
            "aanalytic_residual": self.aanalytic_residual,
            "pompeiu_residual": self.pompeiu_residual,
            "elliptic_residual": self.elliptic_residual,
            "mode_decay": self.mode_decay,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def check(self) -> None:
        vals = [self.aanalytic_residual, self.pompeiu_residual, self.elliptic_residual, *self.mode_decay]
        for e in self.errors.values():
            vals.extend(e.values() if isinstance(e, dict) else [e])
        if not all(math.isfinite(v) and v >= 0 for v in vals):
            raise ValueError("report contains negative or non-finite metrics")


class NegativeModes(ModeSequence):
    """L^2 u: entry k holds u_{-(k+2)} on the grid."""

    def minus(self, n: int) -> np.ndarray:
        if n < 2 or n - 2 > self.N:
            raise IndexError(f"mode u_-{n} is not available")
        return self.u[n - 2]


def _boundary_sequence(bm: BoundaryModes, mu: float) -> BoundarySequence:
    """v on the circle: e^{-G} L^2 g with coefficients of e^{-h} at the boundary points."""
    zeta = np.exp(1j * bm.betas)
    K = bm.N
    coeffs = attenuation_coeffs(zeta, mu, K)
    eg = conv_eG(ModeSequence(bm.g), coeffs, -1)
    return BoundarySequence(eg.u[2:])


def recover_negative_modes(bm: BoundaryModes, cfg: ReconstructionConfig,
                           report: ReconstructionReport | None = None) -> NegativeModes:
    """u_{-2} ... u_{-N} at the inside grid nodes (zero elsewhere)."""
    if bm.N < 4:
        raise ConfigError("at least modes 0..4 are required")
    grid = cfg.grid
    bv = _boundary_sequence(bm, cfg.mu)
    v = bukhgeim_on_grid(bv, grid)
    if report is not None:
        report.aanalytic_residual = aanalytic_residual(v, grid, grid.certified(cfg.delta_B + grid.h))
    ins = grid.inside
    coeffs = attenuation_coeffs(grid.z[ins], cfg.mu, v.N)
    lu = conv_eG(ModeSequence(v.u[:, ins]), coeffs, +1)
    out = np.zeros_like(v.u)
    out[:, ins] = lu.u
    return NegativeModes(out)


def _region_max(a: np.ndarray, region: np.ndarray) -> float:
    return float(np.abs(a[region]).max()) if region.any() else 0.0


def _finish(grid: GridSpec, f0, f2, report: ReconstructionReport) -> TensorField:
    ins = grid.inside
    f0 = np.where(ins, np.real(f0), 0.0)
    f2 = np.where(ins, f2, 0.0)
    report.intermediates.update(f0=f0, f2=f2)
    return tensor_from_modes(ModePair(grid, f0, f2))


def _prepare(s: Sinogram, cfg: ReconstructionConfig, kind: str):
    if cfg.cls != kind:
        raise ConfigError(f"configuration class {cfg.cls!r} does not match {kind!r} inversion")
    if not math.isclose(s.mu, cfg.mu, rel_tol=1e-12, abs_tol=0.0):
        raise ConfigError(f"sinogram mu={s.mu} differs from configured mu={cfg.mu}")
    if s.n_beta != cfg.n_beta or s.n_phi != cfg.n_phi:
        raise ConfigError("sinogram sampling does not match the configuration")
    report = ReconstructionReport(cfg.to_dict())
    bm = boundary_modes(s, cfg.N)
    report.mode_decay = [float(x) for x in bm.decay_profile()]
    return bm, report


def invert_incompressible(s: Sinogram, cfg: ReconstructionConfig,
                          solver: PDSolver | None = None) -> tuple[TensorField, ReconstructionReport]:
    bm, report = _prepare(s, cfg, INCOMPRESSIBLE)
    grid, mu = cfg.grid, cfg.mu
    cert = cfg.certified
    t0 = time.perf_counter()
    modes = recover_negative_modes(bm, cfg, report)
    t1 = time.perf_counter()
    u2, u3 = modes.minus(2), modes.minus(3)
    du2 = _d(u2, grid)
    rhs = -4.0 * _d(_d(u3, grid), grid) - 2.0 * mu * du2
    solver = solver or incompressible_solver(grid, mu)
    u1 = solve_incompressible_bvp(mu, rhs, bm.g[1], grid, solver)
    t2 = time.perf_counter()
    psi = -du2 - mu * u1
    u0 = solve_dbar_grid(PompeiuProblem(psi, bm.g[0], grid, DBAR))
    report.pompeiu_residual = _region_max(_dbar(u0, grid) - psi, cert)
    t3 = time.perf_counter()
    f0 = 2.0 * np.real(_d(u1, grid)) + mu * np.real(u0)
    f2 = _dbar(u1, grid) + _d(u3, grid) + mu * u2
    F = _finish(grid, f0, f2, report)
    # residual of the discrete BVP relative to its right-hand side
    a1, a2 = solver.apply(u1.real, u1.imag, *_re_im(bm.g[1]))
    report.elliptic_residual = _region_max(a1 + 1j * a2 - rhs, grid.inside) / max(1.0, _region_max(rhs, grid.inside))
    report.timings = {"modes": t1 - t0, "elliptic": t2 - t1, "pompeiu": t3 - t2,
                      "total": time.perf_counter() - t0}
    report.intermediates.update(modes=modes, u_minus1=u1, u0=u0)
    return F, report


def _re_im(g):
    g = np.asarray(g)
    return g.real.copy(), g.imag.copy()


def invert_tracefree(s: Sinogram, cfg: ReconstructionConfig,
                     solver: PDSolver | None = None) -> tuple[TensorField, ReconstructionReport]:
    bm, report = _prepare(s, cfg, TRACEFREE)
    grid, mu = cfg.grid, cfg.mu
    cert = cfg.certified
    t0 = time.perf_counter()
    modes = recover_negative_modes(bm, cfg, report)
    t1 = time.perf_counter()
    u2, u3 = modes.minus(2), modes.minus(3)
    dd2 = _d(_d(u2, grid), grid)
    rhs = -4.0 * np.real(dd2)
    solver = solver or PDSolver(grid, 0.0, -2.0 * mu * mu)
    g0 = np.real(bm.g[0])
    u0 = solve_screened_poisson(mu, rhs, g0, grid, solver)
    a0, _ = solver.apply(u0, np.zeros_like(u0), g0, None)
    report.elliptic_residual = _region_max(a0 - rhs, grid.inside) / max(1.0, _region_max(rhs, grid.inside))
    t2 = time.perf_counter()
    psi = -0.5 * mu * u0 - (1j / mu) * np.imag(dd2)
    u1 = solve_d_grid(PompeiuProblem(psi, bm.g[1], grid, D))
    report.pompeiu_residual = _region_max(_d(u1, grid) - psi, cert)
    t3 = time.perf_counter()
    f2 = _dbar(u1, grid) + _d(u3, grid) + mu * u2
    F = _finish(grid, np.zeros((grid.n, grid.n)), f2, report)
    report.timings = {"modes": t1 - t0, "elliptic": t2 - t1, "pompeiu": t3 - t2,
                      "total": time.perf_counter() - t0}
    report.intermediates.update(modes=modes, u_minus1=u1, u0=u0)
    return F, report


def invert(s: Sinogram, cfg: ReconstructionConfig) -> tuple[TensorField, ReconstructionReport]:
    if cfg.cls == INCOMPRESSIBLE:
        return invert_incompressible(s, cfg)
    return invert_tracefree(s, cfg)


def compare_fields(F: TensorField, Fhat: TensorField, region: np.ndarray) -> dict:
    """Relative L2 and Linf errors per component and for the whole tensor over ``region``.

    The aggregate norm counts f12 twice (Frobenius norm of the symmetric matrix).
    """
    if F.grid != Fhat.grid:
        raise ValueError("fields live on different grids")
    region = np.asarray(region, dtype=bool)
    out = {}
    num2 = den2 = 0.0
    numi = deni = 0.0
    for name, a, b, w in (("f11", F.f11, Fhat.f11, 1.0), ("f12", F.f12, Fhat.f12, 2.0),
                          ("f22", F.f22, Fhat.f22, 1.0)):
        diff = (b - a)[region]
        ref = a[region]
        n2, d2 = float(diff @ diff), float(ref @ ref)
        ni = float(np.abs(diff).max(initial=0.0))
        di = float(np.abs(ref).max(initial=0.0))
        out[name] = {"rel_l2": _ratio(math.sqrt(n2), math.sqrt(d2)), "rel_linf": _ratio(ni, di)}
        num2 += w * n2
        den2 += w * d2
        numi, deni = max(numi, ni), max(deni, di)
    out["tensor"] = {"rel_l2": _ratio(math.sqrt(num2), math.sqrt(den2)), "rel_linf": _ratio(numi, deni)}
    return out


def _ratio(a: float, b: float) -> float:
    if b == 0.0:
        return 0.0 if a == 0.0 else math.inf
    return a / b


def divergence_max(F: TensorField, region: np.ndarray) -> float:
    d1, d2 = divergence(F)
    return max(_region_max(d1, region), _region_max(d2, region))
