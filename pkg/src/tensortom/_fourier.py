"""Trigonometric interpolation of equispaced periodic samples on the circle."""

from __future__ import annotations

import numpy as np


def trig_coeffs(samples: np.ndarray) -> np.ndarray:
    """Coefficients c_k (numpy FFT order) with samples = sum_k c_k e^{i k beta_m}."""
    samples = np.asarray(samples)
    return np.fft.fft(samples, axis=-1) / samples.shape[-1]


def _signed_freqs(M: int) -> np.ndarray:
    return np.rint(np.fft.fftfreq(M, 1.0 / M)).astype(np.int64)


def trig_eval(samples: np.ndarray, beta) -> np.ndarray:
    """Evaluate the trigonometric interpolant of ``samples`` (last axis) at angles ``beta``.

    The Nyquist term, when present, is split evenly between +M/2 and -M/2 so
    that real data interpolate to real values.
    """
    c = trig_coeffs(samples)
    M = c.shape[-1]
    k = _signed_freqs(M)
    beta = np.asarray(beta, dtype=float)
    E = np.exp(1j * np.multiply.outer(beta, k))
    if M % 2 == 0:
        E[..., M // 2] = np.cos(0.5 * M * beta)
    return np.tensordot(c, E, axes=([-1], [-1]))


def upsample(samples: np.ndarray, M_new: int) -> np.ndarray:
    """Resample periodic data (last axis) onto ``M_new`` equispaced points by zero padding."""
    samples = np.asarray(samples)
    M = samples.shape[-1]
    if M_new == M:
        return samples.copy()
    if M_new < M:
        raise ValueError("upsample only increases the sample count")
    c = np.fft.fft(samples, axis=-1)
    out = np.zeros(samples.shape[:-1] + (M_new,), dtype=complex)
    half = M // 2
    out[..., :half] = c[..., :half]
    out[..., M_new - half + (M % 2 == 0):] = c[..., half + (M % 2 == 0):]
    if M % 2 == 0:
        out[..., half] = 0.5 * c[..., half]
        out[..., M_new - half] = 0.5 * c[..., half]
    res = np.fft.ifft(out, axis=-1) * (M_new / M)
    if np.isrealobj(samples):
        return res.real
    return res


def cauchy_projection(samples: np.ndarray, z) -> np.ndarray:
    """(1/2 pi i) contour integral of g(zeta)/(zeta - z) over the unit circle, |z| < 1.

    For the interpolant g = sum c_k zeta^k this is sum_{k >= 0} c_k z^k; it is
    the limit of the trapezoid rule under unbounded upsampling and stays
    accurate arbitrarily close to the circle.
    """
    c = trig_coeffs(samples)
    M = c.shape[-1]
    kmax = (M - 1) // 2
    terms = [c[..., k] for k in range(kmax + 1)]
    if M % 2 == 0:
        terms.append(0.5 * c[..., M // 2])
    z = np.asarray(z, dtype=complex)
    lead = c.shape[:-1]
    acc = np.zeros(lead + z.shape, dtype=complex)
    for ck in reversed(terms):
        acc = acc * z + np.reshape(ck, lead + (1,) * z.ndim)
    return acc
