"""Constant attenuation on the unit disk: the phase function h, its one-sided
Fourier coefficients, and the sequence convolutions e^{+G}, e^{-G}.

For a = mu on the disk, h(z, theta) = mu tau_+(z, theta) - (Ra - i HRa)/2 at
s = z . theta_perp reduces to -mu conj(z) e^{i phi}, so that

    e^{-h} = sum_k (mu conj z)^k / k! e^{i k phi},
    e^{+h} = sum_k (-mu conj z)^k / k! e^{i k phi}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .transform import _gauss_legendre

HILBERT_GUARD = 1e-3


def radon_constant(s, mu: float):
    """Radon transform of mu * 1_disk: 2 mu sqrt(1 - s^2) on |s| <= 1, else 0."""
    s = np.asarray(s, dtype=float)
    out = 2.0 * mu * np.sqrt(np.clip(1.0 - s * s, 0.0, None))
    return float(out) if out.ndim == 0 else out


def hilbert_finite(samples, t: float, n_nodes: int = 4096) -> float:
    """(1/pi) PV int_{-1}^{1} f(s) / (t - s) ds.

    ``samples`` is a callable or an array of values on ``linspace(-1, 1, len)``.
    The singularity is subtracted, f(t) log((1+t)/(1-t)) added back, and the
    regular remainder integrated by the trapezoid rule on ``n_nodes`` (even)
    panels; the node closest to t is excluded symmetrically by replacing its
    value with the mean of its neighbours.
    """
    t = float(t)
    if abs(t) >= 1.0 - HILBERT_GUARD:
        raise ValueError(f"|t|={abs(t)} inside the guard band of the finite Hilbert transform")
    if n_nodes % 2:
        raise ValueError("n_nodes must be even")
    s = np.linspace(-1.0, 1.0, n_nodes + 1)
    if callable(samples):
        fs = np.asarray(samples(s), dtype=float)
        ft = float(np.asarray(samples(np.array(t))))
    else:
        grid_vals = np.asarray(samples, dtype=float)
        nodes = np.linspace(-1.0, 1.0, grid_vals.size)
        fs = np.interp(s, nodes, grid_vals)
        ft = float(np.interp(t, nodes, grid_vals))
    diff = t - s
    k = int(np.argmin(np.abs(diff)))
    with np.errstate(divide="ignore", invalid="ignore"):
        g = (fs - ft) / diff
    if abs(diff[k]) < 1e-9:
        g[k] = 0.5 * (g[k - 1] + g[k + 1])
    ds = s[1] - s[0]
    reg = ds * (g.sum() - 0.5 * (g[0] + g[-1]))
    return (reg + ft * math.log((1.0 + t) / (1.0 - t))) / math.pi


def h_closed_form(z, phi, mu: float):
    return -mu * np.conj(np.asarray(z, dtype=complex)) * np.exp(1j * np.asarray(phi))


def h_function(z, phi, mu: float):
    """h(z, theta) from the divergent-beam and Radon/Hilbert terms, using the
    disk's closed forms Ra(s) = 2 mu sqrt(1 - s^2) and HRa(s) = 2 mu s."""
    z = np.asarray(z, dtype=complex)
    phi = np.asarray(phi, dtype=float)
    if np.any(np.abs(z) > 1.0 + 1e-12):
        raise geometry.GeometryError("h is defined on the closed disk")
    c, sn = np.cos(phi), np.sin(phi)
    _, tau_plus = geometry.travel_times_array(z.real, z.imag, c, sn)
    s = -z.real * sn + z.imag * c
    if np.any(np.abs(s) > 1.0):
        raise geometry.GeometryError("|z . theta_perp| > 1")
    out = mu * tau_plus - 0.5 * (radon_constant(s, mu) - 1j * 2.0 * mu * s)
    return complex(out) if np.ndim(out) == 0 else out


def h_quadrature(z: complex, phi: float, mu: float, n_nodes: int = 4096) -> complex:
    """h(z, theta) with every term evaluated numerically (oracle path)."""
    z = complex(z)
    c, sn = math.cos(phi), math.sin(phi)
    _, tau_plus = geometry.travel_times_array(z.real, z.imag, c, sn)
    tau_plus = float(tau_plus)
    # divergent beam int_0^inf a(z + t theta) dt with a = mu on the disk
    gx, gw = _gauss_legendre(32)
    t = 0.5 * tau_plus * (gx + 1.0)
    px, py = z.real + t * c, z.imag + t * sn
    a_vals = np.where(px * px + py * py <= 1.0 + 1e-12, mu, 0.0)
    beam = 0.5 * tau_plus * float(a_vals @ gw)
    s = -z.real * sn + z.imag * c
    ra = radon_constant(s, mu)
    hra = hilbert_finite(lambda x: radon_constant(x, mu), s, n_nodes)
    return beam - 0.5 * (ra - 1j * hra)


@dataclass
class AttenuationCoeffs:
    """alpha[k], beta_c[k] (k = 0..K): Fourier modes of e^{-h} and e^{+h} at ``points``."""

    mu: float
    K: int
    alpha: np.ndarray
    beta_c: np.ndarray
    points: np.ndarray

    @property
    def shape(self) -> tuple:
        return self.alpha.shape[1:]


def closed_form_coeffs(points, mu: float, K: int) -> AttenuationCoeffs:
    pts = np.asarray(points, dtype=complex)
    w = mu * np.conj(pts)
    alpha = np.empty((K + 1,) + pts.shape, dtype=complex)
    beta = np.empty_like(alpha)
    alpha[0] = 1.0
    beta[0] = 1.0
    for k in range(1, K + 1):
        alpha[k] = alpha[k - 1] * w / k
        beta[k] = beta[k - 1] * (-w) / k
    return AttenuationCoeffs(float(mu), K, alpha, beta, pts)


def attenuation_coeffs(points, mu: float, K: int, M: int | None = None,
                       check: bool = True) -> AttenuationCoeffs:
    """Fourier analysis of e^{-/+h(z, .)} on M equispaced directions.

    ``points`` is an array of complex points or a GridSpec (all nodes).
    Negative-index coefficients are verified to vanish.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if hasattr(points, "z"):
        points = points.z
    pts = np.asarray(points, dtype=complex)
    if M is None:
        M = max(64, 1 << math.ceil(math.log2(4 * K)))
    if M < 4 * K or M & (M - 1):
        raise ValueError("M must be a power of two >= 4K")
    phis = 2.0 * math.pi * np.arange(M) / M
    flat = pts.ravel()
    h = h_closed_form(flat[:, None], phis[None, :], mu)
    a_hat = np.fft.fft(np.exp(-h), axis=1) / M
    b_hat = np.fft.fft(np.exp(h), axis=1) / M
    if check:
        neg = max(np.abs(a_hat[:, M // 2 + 1:]).max(initial=0.0),
                  np.abs(b_hat[:, M // 2 + 1:]).max(initial=0.0))
        if neg > 1e-8:
            raise ValueError(f"e^(-/+h) has negative Fourier modes of size {neg:.2e}")
    alpha = a_hat[:, : K + 1].T.reshape((K + 1,) + pts.shape)
    beta = b_hat[:, : K + 1].T.reshape((K + 1,) + pts.shape)
    return AttenuationCoeffs(float(mu), K, alpha, beta, pts)


@dataclass
class ModeSequence:
    """Truncated non-positive modes: u[n] holds u_{-n}, n = 0..N, over any spatial shape."""

    u: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=complex)

    @property
    def N(self) -> int:
        return self.u.shape[0] - 1

    def __getitem__(self, n):
        return self.u[n]

    def shift(self, k: int = 1) -> "ModeSequence":
        """Left translation L^k: (u_0, u_-1, ...) -> (u_-k, u_-k-1, ...)."""
        return ModeSequence(self.u[k:])

    def l1(self) -> np.ndarray:
        return np.abs(self.u).sum(axis=0)


def conv_eG(u: ModeSequence, c: AttenuationCoeffs, sign: int) -> ModeSequence:
    """e^{-G} (sign=-1, coefficients alpha) or e^{+G} (sign=+1, beta_c) on a truncated sequence.

    (e^{-G} u)_{-n} = sum_{k=0}^{min(K, N-n)} alpha_k u_{-n-k}; out-of-range terms dropped.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if c.shape != u.u.shape[1:]:
        raise ValueError(f"coefficient shape {c.shape} does not match sequence shape {u.u.shape[1:]}")
    coef = c.alpha if sign < 0 else c.beta_c
    N = u.N
    out = np.zeros_like(u.u)
    for k in range(min(c.K, N) + 1):
        out[: N + 1 - k] += coef[k] * u.u[k:]
    return ModeSequence(out)
