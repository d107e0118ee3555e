# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops; same signatures as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport hypot

cnp.import_array()

ctypedef double complex cplx


def twisted_convolution(cplx[:, ::1] F, cplx[:, ::1] G, cplx[:, ::1] P, cnp.int64_t[:, ::1] sub):
    cdef Py_ssize_t n = F.shape[0]
    cdef Py_ssize_t xi, u, zeta, y, r
    cdef cplx acc, f
    out = np.zeros((n, n), dtype=np.complex128)
    cdef cplx[:, ::1] o = out
    cdef double inv = 1.0 / n
    for xi in range(n):
        for zeta in range(n):
            r = sub[xi, zeta]
            for y in range(n):
                f = F[zeta, y]
                if f == 0:
                    continue
                f = f * P[r, y]
                for u in range(n):
                    o[xi, u] = o[xi, u] + f * G[r, sub[u, y]]
    for xi in range(n):
        for u in range(n):
            o[xi, u] = o[xi, u] * inv
    return out


def diagonal_envelope(cplx[:, ::1] A, cnp.int64_t[:, ::1] sub):
    cdef Py_ssize_t m = A.shape[0]
    cdef Py_ssize_t i, k
    cdef cplx a
    cdef double mag
    out = np.zeros(m, dtype=np.float64)
    cdef double[::1] d = out
    for i in range(m):
        for k in range(m):
            a = A[i, sub[i, k]]
            mag = hypot(a.real, a.imag)
            if mag > d[k]:
                d[k] = mag
    return out


def phase_stft(cplx[:, ::1] sigma, cplx[:, ::1] psi, cplx[:, ::1] P, cnp.int64_t[:, ::1] sub):
    # the shift-and-multiply gather is done here; the two DFT stages go to BLAS
    cdef Py_ssize_t n = sigma.shape[0]
    cdef Py_ssize_t x, xi, t, tau, r
    cdef cplx p, s
    W_arr = np.empty((n, n, n, n), dtype=np.complex128)
    cdef cplx[:, :, :, ::1] W = W_arr
    for x in range(n):
        for t in range(n):
            r = sub[t, x]
            for xi in range(n):
                for tau in range(n):
                    p = psi[r, sub[tau, xi]]
                    s = sigma[t, tau]
                    W[x, xi, t, tau] = s * (p.real - 1j * p.imag)
    Pc = np.conj(P)
    out = np.matmul(np.matmul(Pc, W_arr), Pc)
    out *= 1.0 / n
    return out


def envelope_sup(cplx[:, :, :, ::1] V):
    cdef Py_ssize_t n0 = V.shape[0], n1 = V.shape[1], n2 = V.shape[2], n3 = V.shape[3]
    cdef Py_ssize_t a, b, c, d
    cdef cplx z
    cdef double mag
    out = np.zeros((n2, n3), dtype=np.float64)
    cdef double[:, ::1] o = out
    for a in range(n0):
        for b in range(n1):
            for c in range(n2):
                for d in range(n3):
                    z = V[a, b, c, d]
                    mag = z.real * z.real + z.imag * z.imag
                    if mag > o[c, d]:
                        o[c, d] = mag
    return np.sqrt(out)
