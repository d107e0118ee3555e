"""NumPy implementations of the inner loops.

Each function takes plain arrays plus the group's subtraction table and
pairing matrix, and mirrors the signature of the compiled module exactly.
"""
import numpy as np


def twisted_convolution(F, G, P, sub):
    """(F # G)[xi, u] = (1/n) sum_{zeta, y} F[zeta, y] G[xi - zeta, u - y] <xi - zeta, y>."""
    n = F.shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    for zeta in range(n):
        rows = sub[:, zeta]                     # xi - zeta
        phase = P[rows, :]                      # [xi, y]
        shifted = G[rows][:, sub]               # [xi, u, y] = G[xi - zeta, u - y]
        out += np.einsum("y,xy,xuy->xu", F[zeta], phase, shifted)
    return out / n


def diagonal_envelope(A, sub):
    """d[k] = max_i |A[i, i - k]| over a group-indexed square matrix."""
    m = A.shape[0]
    cols = sub[np.arange(m)[:, None], np.arange(m)[None, :]]   # cols[i, k] = i - k
    return np.abs(A[np.arange(m)[:, None], cols]).max(axis=0)


def phase_stft(sigma, psi, P, sub):
    """V[x, xi, omega, u] = (1/n) sum_{t, tau} sigma[t, tau] conj(psi[t - x, tau - xi])
    conj(<omega, t>) conj(<tau, u>)."""
    n = sigma.shape[0]
    Pc = np.conj(P)
    # shifted[x, xi, t, tau] = psi[t - x, tau - xi]
    shifted = psi[sub.T[:, None, :, None], sub.T[None, :, None, :]]
    W = sigma[None, None] * np.conj(shifted)
    return (Pc @ W @ Pc) / n


def envelope_sup(V):
    """sup over the first two axes of |V|, i.e. the column maxima over phase points."""
    n = V.shape[0]
    return np.abs(V).reshape(n * n, -1).max(axis=0).reshape(V.shape[2:])
