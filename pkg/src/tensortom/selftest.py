"""Oracle checks run by ``tensortom selftest``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attenuation import (ModeSequence, attenuation_coeffs, closed_form_coeffs, conv_eG, h_closed_form,
                          h_quadrature, hilbert_finite)
from .bukhgeim import BoundarySequence, bukhgeim_evaluate
from .elliptic import PDSolver
from .fields import constant_field
from .grid import GridSpec
from .pompeiu import PompeiuProblem, solve_dbar_grid
from .transform import xray_exponential


@dataclass
class CheckResult:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual)) and self.residual <= self.tol

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<34s} residual={self.residual:.3e}  tol={self.tol:.1e}"


def check_forward(mu: float) -> CheckResult:
    val = xray_exponential(constant_field(1.0, 0.0, 1.0), mu, 0.0, 0.0)
    exact = (1.0 - math.exp(-2.0 * mu)) / mu if mu > 0 else 2.0
    return CheckResult("forward diameter ray", abs(val - exact), 1e-8)


def check_h(mu: float, rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for _ in range(10):
        z = 0.9 * math.sqrt(rng.random()) * complex(math.cos(a := rng.uniform(0, 2 * math.pi)), math.sin(a))
        phi = rng.uniform(0, 2 * math.pi)
        worst = max(worst, abs(h_quadrature(z, phi, mu) - complex(h_closed_form(z, phi, mu))))
    return CheckResult("h quadrature vs closed form", worst, 1e-4)


def check_hilbert() -> CheckResult:
    # f = 1 has the transform log((1+t)/(1-t)) / pi; an even f vanishes at t = 0
    r1 = max(abs(hilbert_finite(np.ones_like, t) - math.log((1 + t) / (1 - t)) / math.pi)
             for t in (-0.6, 0.0, 0.3, 0.8))
    r2 = abs(hilbert_finite(lambda s: np.cos(s), 0.0))
    return CheckResult("finite Hilbert identities", max(r1, r2), 1e-6)


def check_alpha(mu: float, rng: np.random.Generator, K: int = 16) -> CheckResult:
    pts = 0.95 * np.sqrt(rng.random(20)) * np.exp(2j * math.pi * rng.random(20))
    a = attenuation_coeffs(pts, mu, K)
    b = closed_form_coeffs(pts, mu, K)
    return CheckResult("alpha_k closed form", float(np.abs(a.alpha - b.alpha).max()), 1e-8)


def check_eG_identity(mu: float, rng: np.random.Generator, N: int = 32, K: int = 16,
                      corrupt_alpha: bool = False) -> CheckResult:
    pts = 0.95 * np.sqrt(rng.random(20)) * np.exp(2j * math.pi * rng.random(20))
    c = attenuation_coeffs(pts, mu, K)
    if corrupt_alpha:
        c.alpha[1] = c.alpha[1] * 1.01 + 1e-3
    u = ModeSequence(rng.standard_normal((N + 1, 20)) + 1j * rng.standard_normal((N + 1, 20)))
    back = conv_eG(conv_eG(u, c, -1), c, +1)
    err = float(np.abs(back.u[: N - K + 1] - u.u[: N - K + 1]).max())
    return CheckResult("e^G o e^-G identity", err, 1e-8)


def check_bukhgeim(M: int = 512, N: int = 8) -> CheckResult:
    c = 0.3 - 0.2j

    def seq(z):
        return [np.conj(z), 0 * z, -z, 0 * z, c + 0 * z]

    bv = BoundarySequence.from_function(seq, N, M)
    g = GridSpec(65)
    z = g.z[g.certified()]
    out = bukhgeim_evaluate(bv, z)
    ref = np.zeros_like(out)
    for n, vn in enumerate(seq(z)):
        ref[n] = vn
    return CheckResult("Bukhgeim-Cauchy reproduction", float(np.abs(out - ref).max()), 1e-6)


def check_elliptic(n: int = 65) -> CheckResult:
    """Manufactured u = ((1-r^2)^2, 0) for C1 = 4, C2 = -2 at order-h^2 tolerance."""
    g = GridSpec(n)
    x, y = g.mesh
    r2 = x * x + y * y
    u1 = (1 - r2) ** 2
    # Delta u1 + d1(d1 u1) - 2 u1 and d2(d1 u1)
    lap = 16 * r2 - 8
    d11 = -4 * (1 - r2) + 8 * x * x
    d12 = 8 * x * y
    f1 = lap + d11 - 2 * u1
    f2 = d12
    s = PDSolver(g, 4.0, -2.0)
    a, b = s.solve(f1, f2)
    err = max(np.abs(a - u1)[g.inside].max(), np.abs(b)[g.inside].max())
    z0 = max(np.abs(v).max() for v in s.solve(np.zeros_like(x), np.zeros_like(x)))
    return CheckResult("elliptic manufactured solution", float(err + z0), 5.0 * g.h ** 2)


def check_pompeiu(n: int = 65) -> CheckResult:
    g = GridSpec(n)
    beta = 2 * math.pi * np.arange(256) / 256
    u = solve_dbar_grid(PompeiuProblem(np.ones((n, n)), np.exp(-1j * beta), g))
    cert = g.certified()
    return CheckResult("Pompeiu dbar identity", float(np.abs(u - np.conj(g.z))[cert].max()), 1e-3)


def run_selftest(mu: float = 1.0, seed: int = 0, corrupt_alpha: bool = False) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        check_forward(mu),
        check_h(mu, rng),
        check_hilbert(),
        check_alpha(mu, rng),
        check_eG_identity(mu, rng, corrupt_alpha=corrupt_alpha),
        check_bukhgeim(),
        check_elliptic(),
        check_pompeiu(),
    ]
