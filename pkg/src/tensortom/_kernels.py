"""Compiled inner loops for the boundary and area integrals."""

import numba
import numpy as np


@numba.njit(parallel=True, cache=True)
def bukhgeim_trapezoid(z, zeta, data, out):
    """Trapezoid rule for the Bukhgeim-Cauchy integral at points ``z``.

    data[j, m] = v_{-j}(zeta_m); out[j, p] receives (B v)_{-j}(z_p). The
    j-series sum_i v_{-j-2i} R^i is accumulated by the Horner recursion
    T_j = R (v_{-j-2} + T_{j+2}).
    """
    J, M = data.shape
    P = z.shape[0]
    inv_m = 1.0 / M
    for p in numba.prange(P):
        zp = z[p]
        acc = np.zeros(J, dtype=np.complex128)
        T = np.zeros(J + 2, dtype=np.complex128)
        for m in range(M):
            w = zeta[m] - zp
            A = zeta[m] / w
            D = 2.0 * A.real
            R = np.conj(w) / w
            T[J] = 0.0
            T[J + 1] = 0.0
            for j in range(J - 1, -1, -1):
                if j + 2 < J:
                    T[j] = R * (data[j + 2, m] + T[j + 2])
                else:
                    T[j] = 0.0
            for j in range(J):
                acc[j] += data[j, m] * A + D * T[j]
        for j in range(J):
            out[j, p] = acc[j] * inv_m


@numba.njit(parallel=True, cache=True)
def cut_cell_sum(z, centers, vals, centroid, area, cp, cw, cptr, fp, fw, fptr, near, far, out):
    """Add sum over cut cells of vals[c] iint_{cell c} 1/(zeta - z) to out, per point.

    Cells whose centre lies within ``near`` of z use the fine rule, beyond
    ``far`` a one-point centroid rule, otherwise the coarse rule; exactly
    coincident nodes are skipped.
    """
    P = z.shape[0]
    C = centers.shape[0]
    for p in numba.prange(P):
        zp = z[p]
        acc = 0.0 + 0.0j
        for c in range(C):
            if vals[c] == 0.0:
                continue
            dist = abs(centers[c] - zp)
            if dist > far:
                acc += vals[c] * area[c] / (centroid[c] - zp)
                continue
            if dist < near:
                pts, wts, a, b = fp, fw, fptr[c], fptr[c + 1]
            else:
                pts, wts, a, b = cp, cw, cptr[c], cptr[c + 1]
            s = 0.0 + 0.0j
            for q in range(a, b):
                dz = pts[q] - zp
                if dz.real != 0.0 or dz.imag != 0.0:
                    s += wts[q] / dz
            acc += vals[c] * s
        out[p] += acc
