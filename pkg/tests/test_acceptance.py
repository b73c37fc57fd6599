"""Acceptance criteria. Each test prints one PASS/FAIL line through the ``acceptance`` fixture."""

import math
import time

import numpy as np
from conftest import KINDS
from manufactured import observed_orders

from tensortom.attenuation import (ModeSequence, attenuation_coeffs, conv_eG, h_closed_form, h_function,
                                   h_quadrature)
from tensortom.bukhgeim import BoundarySequence, aanalytic_residual, bukhgeim_evaluate, bukhgeim_on_grid
from tensortom.elliptic import PDSolver, d, dbar
from tensortom.fields import INCOMPRESSIBLE, TRACEFREE, BumpPhantom, constant_field, default_phantom, modes_from_tensor
from tensortom.grid import GridSpec
from tensortom.pipeline import (ReconstructionConfig, compare_fields, divergence_max, invert,
                                recover_negative_modes)
from tensortom.pompeiu import D, DBAR, PompeiuProblem, solve_d_grid, solve_dbar_grid
from tensortom.transform import boundary_modes, sample_sinogram, xray_exponential

ROUND_TRIP_TOL = 0.10
RUNTIME_BUDGET = 300.0


def _random_points(rng, k, rmax=0.95):
    return rmax * np.sqrt(rng.random(k)) * np.exp(2j * math.pi * rng.random(k))


def test_criterion_01_forward_oracle(acceptance):
    t0 = time.perf_counter()
    val = xray_exponential(constant_field(1.0, 0.0, 1.0), 1.0, 0.0, 0.0)
    elapsed = time.perf_counter() - t0
    err = abs(val - (1.0 - math.exp(-2.0)))
    ok = acceptance(1, "forward diameter ray", err <= 1e-8 and elapsed < 1.0,
                    f"|error|={err:.2e} (tol 1e-8), runtime={elapsed:.3f}s (< 1 s)")
    assert ok


def test_criterion_02_h_function_oracle(acceptance, rng):
    z = _random_points(rng, 100)
    phi = rng.uniform(0, 2 * math.pi, 100)
    mu = rng.uniform(0.1, 3.0, 100)
    quad = max(abs(h_quadrature(a, b, c) - complex(h_closed_form(a, b, c))) for a, b, c in zip(z, phi, mu))
    exact = -mu * np.conj(z) * np.exp(1j * phi)
    closed = max(abs(complex(h_closed_form(a, b, c)) - e) for a, b, c, e in zip(z, phi, mu, exact))
    selfc = max(abs(h_function(a, b, c) - complex(h_closed_form(a, b, c))) for a, b, c in zip(z, phi, mu))
    ok = acceptance(2, "h-function oracle", quad <= 1e-4 and max(closed, selfc) <= 1e-10,
                    f"quadrature max err={quad:.2e} (tol 1e-4), closed form max err={max(closed, selfc):.2e} "
                    f"(tol 1e-10)")
    assert ok


def test_criterion_03_attenuation_coefficients(acceptance, rng):
    K = 16
    pts = _random_points(rng, 50)
    alpha_err = 0.0
    for mu in (0.5, 1.0, 2.0):
        c = attenuation_coeffs(pts, mu, K)
        w = mu * np.conj(pts)
        ref = np.array([w ** k / math.factorial(k) for k in range(K + 1)])
        alpha_err = max(alpha_err, float(np.abs(c.alpha - ref).max()))
    N = 32
    c = attenuation_coeffs(pts, 1.0, K)
    u = ModeSequence(rng.standard_normal((N + 1, pts.size)) + 1j * rng.standard_normal((N + 1, pts.size)))
    back = conv_eG(conv_eG(u, c, -1), c, +1)
    id_err = float(np.abs(back.u[: N - K + 1] - u.u[: N - K + 1]).max())
    ok = acceptance(3, "attenuation coefficients", alpha_err <= 1e-8 and id_err <= 1e-8,
                    f"alpha_k max err={alpha_err:.2e}, e^G e^-G identity err={id_err:.2e} (tol 1e-8)")
    assert ok


def _linear_seq(z):
    return [np.conj(z), 0 * z, -z, 0 * z, (0.3 - 0.2j) + 0 * z]


def _cubic_seq(z):
    zb = np.conj(z)
    return [zb ** 3, 0 * z, -3 * z * zb ** 2, 0 * z, 3 * z ** 2 * zb, 0 * z, -z ** 3]


def test_criterion_04_bukhgeim_reproduction(acceptance):
    g = GridSpec(257)
    cert = g.certified()
    bv = BoundarySequence.from_function(_linear_seq, 8, 512)
    out = bukhgeim_evaluate(bv, g.z[cert])
    ref = np.zeros_like(out)
    for n, vn in enumerate(_linear_seq(g.z[cert])):
        ref[n] = vn
    rep = float(np.abs(out - ref).max())
    lin_res = aanalytic_residual(bukhgeim_on_grid(bv, g), g, cert)
    cubic = BoundarySequence.from_function(_cubic_seq, 8, 512)
    res = []
    for n in (65, 129, 257):
        gn = GridSpec(n)
        res.append(aanalytic_residual(bukhgeim_on_grid(cubic, gn), gn, gn.certified()))
    orders = [math.log2(res[i] / res[i + 1]) for i in range(2)]
    ok = acceptance(4, "Bukhgeim-Cauchy reproduction",
                    rep <= 1e-6 and lin_res <= g.h ** 2 and min(orders) >= 1.8,
                    f"reproduction err={rep:.2e} (tol 1e-6), linear residual={lin_res:.2e} (<= h^2={g.h ** 2:.2e}), "
                    f"cubic residual orders={orders[0]:.2f},{orders[1]:.2f} (>= 1.8)")
    assert ok


def test_criterion_05_elliptic_solver(acceptance):
    details, ok = [], True
    for C1, C2 in ((0.0, 0.0), (0.0, -2.0), (4.0, -2.0)):
        _, orders = observed_orders(C1, C2, (65, 129, 257))
        ok &= min(orders) >= 1.8
        details.append(f"({C1:g},{C2:g}): {orders[0]:.2f},{orders[1]:.2f}")
    g = GridSpec(257)
    zero = np.zeros((g.n, g.n))
    zmax = 0.0
    for C1, C2 in ((0.0, 0.0), (0.0, -2.0), (4.0, -2.0)):
        a, b = PDSolver(g, C1, C2).solve(zero, zero)
        zmax = max(zmax, float(np.abs(a).max()), float(np.abs(b).max()))
    ok &= zmax <= 1e-12
    ok = acceptance(5, "elliptic solver", ok, "orders " + "; ".join(details) + f" (>= 1.8), zero data max={zmax:.1e}")
    assert ok


def test_criterion_06_pompeiu_identities(acceptance):
    g = GridSpec(257)
    cert = g.certified()
    one = np.ones((g.n, g.n), dtype=complex)
    ub = solve_dbar_grid(PompeiuProblem(one, lambda zeta: np.conj(zeta), g, DBAR))
    ud = solve_d_grid(PompeiuProblem(one, lambda zeta: zeta, g, D))
    eb = float(np.abs(ub - np.conj(g.z))[cert].max())
    ed = float(np.abs(ud - g.z)[cert].max())
    ok = acceptance(6, "Pompeiu identities", max(eb, ed) <= 1e-3,
                    f"dbar case err={eb:.2e}, d case err={ed:.2e} (tol 1e-3)")
    assert ok


def _mode_residuals(kind, oracle_grid_modes, mu=1.0):
    """Scaled residuals of the mode equations for indices 0, -1, -2, -3, -4 with oracle modes."""
    ph, g, U = oracle_grid_modes(kind, mu)
    F = ph.sample(g)
    m = modes_from_tensor(F)
    fmax = max(float(np.abs(c).max()) for c in F.components)
    cert = g.certified()

    def u(k):
        return U[-k] if k <= 0 else np.conj(U[k])

    res = [dbar(u(1), g) + d(u(-1), g) + mu * u(0) - m.f0,
           dbar(u(0), g) + d(u(-2), g) + mu * u(-1),
           dbar(u(-1), g) + d(u(-3), g) + mu * u(-2) - m.f2]
    res += [dbar(u(-k), g) + d(u(-k - 2), g) + mu * u(-k - 1) for k in (2, 3)]
    return [float(np.abs(r[cert]).max()) / (fmax * g.h ** 2) for r in res]


def test_criterion_07_mode_system_residuals(acceptance, oracle_grid_modes):
    scaled = {kind: _mode_residuals(kind, oracle_grid_modes) for kind in KINDS}
    worst = max(max(v) for v in scaled.values())
    detail = ", ".join(f"{k}: [" + ", ".join(f"{x:.2f}" for x in v) + "]" for k, v in scaled.items())
    ok = acceptance(7, "mode-system residuals", worst <= 5.0,
                    f"residual / (|F| h^2) for modes 0,-1,-2,-3,-4 {detail} (tol 5)")
    assert ok


def test_criterion_08_round_trips(acceptance, roundtrips):
    errs, total = {}, 0.0
    for kind in KINDS:
        rt = roundtrips(kind)
        errs[kind] = compare_fields(rt.truth, rt.F, rt.cfg.certified)["tensor"]["rel_l2"]
        total += rt.forward_seconds + rt.invert_seconds
    ok = acceptance(8, "end-to-end round trips",
                    max(errs.values()) <= ROUND_TRIP_TOL and total <= RUNTIME_BUDGET,
                    ", ".join(f"{k} rel L2={e:.2e}" for k, e in errs.items())
                    + f" (tol {ROUND_TRIP_TOL}), total runtime={total:.1f}s (<= {RUNTIME_BUDGET:.0f}s)")
    assert ok


def test_criterion_09_class_invariants(acceptance, roundtrips):
    tf = roundtrips(TRACEFREE)
    trace_max = float(np.abs(tf.F.trace).max())
    inc = roundtrips(INCOMPRESSIBLE)
    cert = inc.cfg.certified
    div_hat = divergence_max(inc.F, cert)
    div_true = divergence_max(inc.truth, cert)
    ok = acceptance(9, "class invariants", trace_max == 0.0 and div_hat <= 3.0 * div_true,
                    f"trace-free max |trace|={trace_max:.1e} (exact 0), incompressible max |div F_hat|={div_hat:.2e} "
                    f"vs 3 x phantom {div_true:.2e}")
    assert ok


def _mode_drift(kind):
    mu = 1e-3
    ph = BumpPhantom(default_phantom(kind))
    cfg = ReconstructionConfig(mu=mu, cls=kind)
    s_mu = sample_sinogram(ph, mu, cfg.n_beta, cfg.n_phi)
    s_0 = sample_sinogram(ph, 0.0, cfg.n_beta, cfg.n_phi)
    m_mu = recover_negative_modes(boundary_modes(s_mu, cfg.N), cfg).u[:, cfg.certified]
    m_0 = recover_negative_modes(boundary_modes(s_0, cfg.N), cfg).u[:, cfg.certified]
    drift = float(np.linalg.norm(m_mu - m_0) / np.linalg.norm(m_0))
    F, report = invert(s_mu, cfg)
    finite = all(np.all(np.isfinite(c)) for c in F.components) and np.isfinite(m_mu).all()
    report.check()
    return drift, bool(finite)


def test_criterion_10_mu_consistency(acceptance):
    results = {kind: _mode_drift(kind) for kind in KINDS}
    ok = all(d <= 0.05 and f for d, f in results.values())
    ok = acceptance(10, "mu-consistency at mu=1e-3",
                    ok, ", ".join(f"{k} mode drift={d:.2e} finite={f}" for k, (d, f) in results.items())
                    + " (tol 5%)")
    assert ok
