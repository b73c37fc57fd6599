"""Exponential X-ray transform of tensor fields, sinograms and their angular modes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import geometry
from ._fourier import trig_eval
from .fields import quadratic_form
from .geometry import TWO_PI, BoundaryPoint, Direction, RayClass

GL_ORDER = 16
NODES_PER_UNIT = 512
_CHUNK_NODES = 2_000_000


@lru_cache(maxsize=8)
def _gauss_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _clip_to_disk(x1, x2, c, s, radius, t_lo, t_hi):
    """Intersect [t_lo, t_hi] with {t : |x + t theta| <= radius}; empty -> (0, 0)."""
    p = x1 * c + x2 * s
    q = x1 * x1 + x2 * x2 - radius * radius
    disc = p * p - q
    ok = disc > 0
    root = np.sqrt(np.where(ok, disc, 0.0))
    a = np.maximum(t_lo, -p - root)
    b = np.minimum(t_hi, -p + root)
    ok &= b > a
    return np.where(ok, a, 0.0), np.where(ok, b, 0.0)


def line_integrals(field, mu: float, x1, x2, c, s, t_lo, t_hi,
                   nodes_per_unit: int = NODES_PER_UNIT) -> np.ndarray:
    """int_{t_lo}^{t_hi} <F(x + t theta) theta, theta> e^{mu t} dt for arrays of rays.

    Composite Gauss-Legendre with equal panels per ray; the panel count is set
    by the longest clipped ray so every ray gets at least ``nodes_per_unit``
    nodes per unit length.
    """
    x1, x2, c, s, t_lo, t_hi = (np.atleast_1d(np.asarray(a, dtype=float)).ravel()
                                for a in np.broadcast_arrays(x1, x2, c, s, t_lo, t_hi))
    radius = float(getattr(field, "support_radius", 1.0))
    out = np.zeros(x1.shape)
    if radius <= 0 or x1.size == 0:
        return out
    a, b = _clip_to_disk(x1, x2, c, s, radius, t_lo, t_hi)
    live = np.flatnonzero(b > a)
    if live.size == 0:
        return out
    max_len = float((b - a)[live].max())
    panels = max(1, math.ceil(max_len * nodes_per_unit / GL_ORDER))
    gx, gw = _gauss_legendre(GL_ORDER)
    # reference nodes on [0, 1] for all panels
    ref = ((np.arange(panels)[:, None] + 0.5 * (gx[None, :] + 1.0)) / panels).ravel()
    refw = np.tile(0.5 * gw / panels, panels)
    chunk = max(1, _CHUNK_NODES // ref.size)
    for start in range(0, live.size, chunk):
        idx = live[start:start + chunk]
        L = (b - a)[idx]
        t = a[idx, None] + L[:, None] * ref[None, :]
        px = x1[idx, None] + t * c[idx, None]
        py = x2[idx, None] + t * s[idx, None]
        f11, f12, f22 = field.evaluate(px, py)
        integrand = quadratic_form(f11, f12, f22, c[idx, None], s[idx, None])
        if mu != 0.0:
            integrand = integrand * np.exp(mu * t)
        out[idx] = L * (integrand @ refw)
    return out


def xray_exponential(field, mu: float, beta: float, phi: float,
                     nodes_per_unit: int = NODES_PER_UNIT) -> float:
    """X_mu F at the outgoing boundary pair (zeta(beta), theta(phi))."""
    zeta = BoundaryPoint(beta)
    d = Direction(phi)
    cls = geometry.classify(zeta, d)
    if cls is not RayClass.OUTGOING:
        raise ValueError(f"(beta={beta}, phi={phi}) is {cls.value}; X_mu F is defined on outgoing pairs")
    if mu < 0:
        raise ValueError("attenuation must be nonnegative")
    x1, x2 = zeta.position
    c, s = math.cos(d.phi), math.sin(d.phi)
    tau, _ = geometry.travel_times_array(x1, x2, c, s)
    return float(line_integrals(field, mu, x1, x2, c, s, -tau, 0.0, nodes_per_unit)[0])


def transport_characteristics(field, mu: float, x, phi, nodes_per_unit: int = NODES_PER_UNIT):
    """Solution u(x, theta) of theta.grad u + mu u = <F theta, theta>, u = 0 on incoming pairs.

    ``x`` may be a single point (pair or complex) or an array of complex
    points; ``phi`` broadcasts against it.
    """
    if np.iscomplexobj(x) or (np.ndim(x) == 0):
        zc = np.asarray(x, dtype=complex)
        x1, x2 = zc.real, zc.imag
    else:
        x1, x2 = float(x[0]), float(x[1])
    x1, x2, ph = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float), np.asarray(phi, float))
    if np.any(x1 * x1 + x2 * x2 > 1.0 + 1e-12):
        raise geometry.GeometryError("transport solution requested outside the disk")
    c, s = np.cos(ph), np.sin(ph)
    tau_m, _ = geometry.travel_times_array(x1, x2, c, s)
    vals = line_integrals(field, mu, x1, x2, c, s, -tau_m, np.zeros_like(tau_m), nodes_per_unit)
    vals = vals.reshape(x1.shape)
    return float(vals) if vals.ndim == 0 else vals


def oracle_modes(field, mu: float, points, N: int, n_phi: int = 64,
                 nodes_per_unit: int = 64) -> np.ndarray:
    """Angular modes u_{-n}(z), n = 0..N, of the transport solution at complex ``points``.

    Computed by the method of characteristics followed by an FFT in phi, using
    the 1/(2 pi) normalization. Returns shape (N + 1,) + points.shape.
    """
    pts = np.asarray(points, dtype=complex)
    flat = pts.ravel()
    phis = TWO_PI * np.arange(n_phi) / n_phi
    u = transport_characteristics(field, mu, flat[:, None], phis[None, :], nodes_per_unit)
    u = np.asarray(u).reshape(flat.size, n_phi)
    modes = np.fft.ifft(u, axis=1)[:, : N + 1].T
    return modes.reshape((N + 1,) + pts.shape)


@dataclass
class Sinogram:
    """Boundary data on the (beta, phi) torus; zero on incoming and tangent pairs."""

    mu: float
    n_beta: int
    n_phi: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.n_beta, self.n_phi):
            raise ValueError(f"values shape {self.values.shape} != ({self.n_beta}, {self.n_phi})")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sinogram contains non-finite values")

    @property
    def betas(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n_beta) / self.n_beta

    @property
    def phis(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n_phi) / self.n_phi

    @property
    def outgoing(self) -> np.ndarray:
        return geometry.outgoing_mask(self.betas[:, None], self.phis[None, :])


def sample_sinogram(field, mu: float, n_beta: int, n_phi: int,
                    nodes_per_unit: int = NODES_PER_UNIT) -> Sinogram:
    if mu < 0:
        raise ValueError("attenuation must be nonnegative")
    if n_phi < 4 or n_phi & (n_phi - 1):
        raise ValueError(f"n_phi must be a power of two, got {n_phi}")
    betas = TWO_PI * np.arange(n_beta) / n_beta
    phis = TWO_PI * np.arange(n_phi) / n_phi
    B, P = np.meshgrid(betas, phis, indexing="ij")
    out = geometry.outgoing_mask(B, P)
    values = np.zeros((n_beta, n_phi))
    bx, by = np.cos(B[out]), np.sin(B[out])
    c, s = np.cos(P[out]), np.sin(P[out])
    tau, _ = geometry.travel_times_array(bx, by, c, s)
    values[out] = line_integrals(field, mu, bx, by, c, s, -tau, np.zeros_like(tau), nodes_per_unit)
    return Sinogram(float(mu), n_beta, n_phi, values)


@dataclass
class BoundaryModes:
    """g[n, b] = g_{-n}(beta_b), n = 0..N, with g_{-n} = (1/2pi) int g e^{i n phi} dphi."""

    g: np.ndarray
    mu: float = 0.0

    @property
    def N(self) -> int:
        return self.g.shape[0] - 1

    @property
    def n_beta(self) -> int:
        return self.g.shape[1]

    @property
    def betas(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n_beta) / self.n_beta

    def at(self, n: int, beta) -> np.ndarray:
        """Trigonometric interpolant of g_{-n} at arbitrary boundary angles."""
        return trig_eval(self.g[n], beta)

    def decay_profile(self) -> np.ndarray:
        return np.abs(self.g).max(axis=1)

    def l1_mass(self) -> np.ndarray:
        return np.abs(self.g).sum(axis=0)


def boundary_modes(s: Sinogram, N: int) -> BoundaryModes:
    if N > s.n_phi // 2 - 1:
        raise ValueError(f"N={N} exceeds n_phi/2 - 1 = {s.n_phi // 2 - 1}")
    g = np.fft.ifft(s.values, axis=1)[:, : N + 1].T.copy()
    return BoundaryModes(g, s.mu)


def synthesize(modes: np.ndarray, phis) -> np.ndarray:
    """Rebuild real data from non-positive modes using g_n = conj(g_{-n}).

    ``modes`` has shape (N + 1, ...); returns shape (...) + phis.shape.
    """
    modes = np.asarray(modes)
    n = np.arange(modes.shape[0])
    E = np.exp(-1j * np.multiply.outer(n, np.asarray(phis)))
    lead = modes.shape[1:]
    flat = modes.reshape(modes.shape[0], -1)
    res = 2.0 * np.real(flat.T @ E.reshape(E.shape[0], -1))
    res -= np.real(flat[0])[:, None]
    return res.reshape(lead + np.shape(phis))
