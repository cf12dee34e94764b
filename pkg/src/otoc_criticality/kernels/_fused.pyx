# cython: boundscheck=False, wraparound=False, cdivision=True
"""Fused correlator kernels: phase construction, BLAS matrix product, and
the weighted trace reduction run in one nogil loop over time samples with
preallocated buffers."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin
from scipy.linalg.cython_blas cimport zgemm

cnp.import_array()

ctypedef double complex zcomplex


cdef inline void _phases(double* E, double t, zcomplex* p, int D) noexcept nogil:
    cdef int a
    cdef double arg
    for a in range(D):
        arg = E[a] * t
        p[a] = cos(arg) + 1j * sin(arg)


cdef void _row_major_gemm(zcomplex* B, zcomplex* V, zcomplex* A, int D) noexcept nogil:
    # Row-major A = B @ V via column-major zgemm on the transposes.
    cdef zcomplex one = 1.0 + 0.0j
    cdef zcomplex zero = 0.0 + 0.0j
    cdef char no = b'N'
    zgemm(&no, &no, &D, &D, &D, &one, V, &D, B, &D, &zero, A, &D)


def otoc_weighted_series(
    zcomplex[:, ::1] W not None,
    zcomplex[:, ::1] V not None,
    double[::1] energies not None,
    double[::1] weights not None,
    double[::1] times not None,
):
    """F(t) = sum_ab w_a A_ab A_ba with A = (W .* phases(t)) @ V."""
    cdef int D = W.shape[0]
    cdef int T = times.shape[0]
    out = np.empty(T, dtype=np.complex128)
    cdef zcomplex[::1] out_v = out
    B_arr = np.empty((D, D), dtype=np.complex128)
    A_arr = np.empty((D, D), dtype=np.complex128)
    p_arr = np.empty(D, dtype=np.complex128)
    cdef zcomplex[:, ::1] B = B_arr
    cdef zcomplex[:, ::1] A = A_arr
    cdef zcomplex[::1] p = p_arr
    cdef int it, a, b
    cdef zcomplex acc, row
    with nogil:
        for it in range(T):
            _phases(&energies[0], times[it], &p[0], D)
            for a in range(D):
                for b in range(D):
                    B[a, b] = W[a, b] * p[a] * p[b].conjugate()
            _row_major_gemm(&B[0, 0], &V[0, 0], &A[0, 0], D)
            acc = 0.0 + 0.0j
            for a in range(D):
                row = 0.0 + 0.0j
                for b in range(D):
                    row = row + A[a, b] * A[b, a]
                acc = acc + weights[a] * row
            out_v[it] = acc
    return out


def tpc_series(
    zcomplex[:, ::1] W not None,
    zcomplex[:, ::1] V not None,
    double[::1] energies not None,
    double[::1] times not None,
    double prefactor=1.0,
):
    """f(t) = prefactor * sum_ab W_ab e^{i(E_a-E_b)t} V_ba."""
    cdef int D = W.shape[0]
    cdef int T = times.shape[0]
    out = np.empty(T, dtype=np.complex128)
    cdef zcomplex[::1] out_v = out
    C_arr = np.ascontiguousarray(prefactor * (np.asarray(W) * np.asarray(V).T))
    cdef zcomplex[:, ::1] C = C_arr
    p_arr = np.empty(D, dtype=np.complex128)
    cdef zcomplex[::1] p = p_arr
    cdef int it, a, b
    cdef zcomplex acc, row
    with nogil:
        for it in range(T):
            _phases(&energies[0], times[it], &p[0], D)
            acc = 0.0 + 0.0j
            for a in range(D):
                row = 0.0 + 0.0j
                for b in range(D):
                    row = row + C[a, b] * p[b].conjugate()
                acc = acc + p[a] * row
            out_v[it] = acc
    return out


def equilibrium_series(
    zcomplex[:, ::1] W not None,
    zcomplex[:, ::1] V not None,
    double[::1] energies not None,
    zcomplex[::1] psi not None,
    double[::1] times not None,
):
    """F_eq(t) = <psi| W(t) V W(t) V |psi> via matrix-vector products."""
    cdef int D = W.shape[0]
    cdef int T = times.shape[0]
    out = np.empty(T, dtype=np.complex128)
    cdef zcomplex[::1] out_v = out
    y_arr = np.asarray(V) @ np.asarray(psi)
    cdef zcomplex[::1] y = y_arr
    p_arr = np.empty(D, dtype=np.complex128)
    q_arr = np.empty(D, dtype=np.complex128)
    apsi_arr = np.empty(D, dtype=np.complex128)
    u_arr = np.empty(D, dtype=np.complex128)
    row_arr = np.empty(D, dtype=np.complex128)
    cdef zcomplex[::1] p = p_arr
    cdef zcomplex[::1] q = q_arr
    cdef zcomplex[::1] apsi = apsi_arr
    cdef zcomplex[::1] u = u_arr
    cdef zcomplex[::1] row = row_arr
    cdef int it, a, b
    cdef zcomplex acc
    with nogil:
        for it in range(T):
            _phases(&energies[0], times[it], &p[0], D)
            # A psi = p * (W @ (conj(p) * y))
            for b in range(D):
                q[b] = p[b].conjugate() * y[b]
            for a in range(D):
                acc = 0.0 + 0.0j
                for b in range(D):
                    acc = acc + W[a, b] * q[b]
                apsi[a] = p[a] * acc
            # row = (conj(p) * ((conj(psi) * p) @ W)) @ V
            for a in range(D):
                q[a] = psi[a].conjugate() * p[a]
            for b in range(D):
                acc = 0.0 + 0.0j
                for a in range(D):
                    acc = acc + q[a] * W[a, b]
                u[b] = p[b].conjugate() * acc
            for b in range(D):
                acc = 0.0 + 0.0j
                for a in range(D):
                    acc = acc + u[a] * V[a, b]
                row[b] = acc
            acc = 0.0 + 0.0j
            for b in range(D):
                acc = acc + row[b] * apsi[b]
            out_v[it] = acc
    return out
