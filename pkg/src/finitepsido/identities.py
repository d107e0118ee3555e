"""Residuals of the exact identities of the finite time-frequency calculus.

Every function returns a max-norm residual (0 up to rounding).  Phase points
are flat indices; ``x, xi`` always denote a position in G and a frequency in G^.
"""
from __future__ import annotations

import time

import numpy as np

from .group import DUAL, Group
from .psido import Symbol, compose_symbols, kn_apply, kn_matrix
from .transforms import (Signal, fourier, modulate, phase_fourier, phase_modulate,
                         phase_stft, phase_translate, rihaczek, stft,
                         stft_of_rihaczek_closed, tf_shift_matrix, translate)


def _max(a) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def plancherel_residual(f: Signal) -> float:
    return abs(f.norm() - fourier(f).norm())


def commutation_residual(f: Signal, x: int, xi: int) -> float:
    """T_x M_xi f = conj(<xi, x>) M_xi T_x f."""
    G = f.group
    P = G.pairing_matrix
    a, w = G.element_at(x), G.element_at(xi, DUAL)
    lhs = translate(modulate(f, w), a).data
    rhs = np.conj(P[xi, x]) * modulate(translate(f, a), w).data
    return _max(lhs - rhs)


def stft_fourier_residual(f: Signal, g: Signal) -> float:
    """V_g f(u, omega) = V_{g^} f^(omega, -u) conj(<omega, u>)."""
    G = f.group
    V = stft(f, g).data
    Vh = stft(fourier(f), fourier(g)).data           # indexed [omega, u] on G^ x G
    rhs = Vh[:, G.neg].T * np.conj(G.pairing_matrix).T
    return _max(V - rhs)


def stft_covariance_residual(f: Signal, g: Signal, x: int, xi: int, y: int, eta: int) -> float:
    """V_{M_eta T_y g} M_xi T_x f (u, omega)
    = V_g f(u - x + y, omega - xi + eta) conj(<omega - xi, x>) <eta, u - x>."""
    G = f.group
    S = G.sub_table
    P = G.pairing_matrix
    lhs = stft(Signal(G, tf_shift_matrix(G, x, xi) @ f.data),
               Signal(G, tf_shift_matrix(G, y, eta) @ g.data)).data
    V = stft(f, g).data
    a = G.add_table[S[:, x], y]                   # u - x + y
    b = G.add_table[S[:, xi], eta]                # omega - xi + eta
    rhs = (V[np.ix_(a, b)] * np.conj(P[S[:, xi], x])[None, :]
           * P[eta, S[:, x]][:, None])
    return _max(lhs - rhs)


def stft_product_fourier_check(f1: Signal, f2: Signal, g1: Signal, g2: Signal) -> float:
    """(V_{g1} f1 conj V_{g2} f2)^(xi, x) = (V_{f2} f1 conj V_{g2} g1)(-x, xi).

    The left side is the phase-space Fourier transform (measure 1/n), indexed
    over G^ x G; the right side is read off at the rotated point.
    """
    from .transforms import GxGhat, PhaseFunction
    G = f1.group
    prod = PhaseFunction(G, stft(f1, g1).data * np.conj(stft(f2, g2).data), GxGhat)
    lhs = phase_fourier(prod).data                       # [xi, x]
    W = stft(f1, f2).data * np.conj(stft(g1, g2).data)   # [x, xi]
    rhs = W[G.neg, :].T
    return _max(lhs - rhs)


def rihaczek_covariance_residual(f: Signal, g: Signal, x: int, xi: int, y: int, eta: int) -> float:
    """R(pi(x, xi) g, pi(y, eta) f) = <eta, x - y> M_{J((y, eta) - (x, xi))} T_{(x, eta)} R(g, f)."""
    G = f.group
    P = G.pairing_matrix
    lhs = rihaczek(Signal(G, tf_shift_matrix(G, x, xi) @ g.data),
                   Signal(G, tf_shift_matrix(G, y, eta) @ f.data)).data
    base = phase_translate(rihaczek(g, f), x, eta)
    # J(y - x, eta - xi) = (xi - eta, y - x)
    rhs = P[eta, G.sub_table[x, y]] * phase_modulate(base, G.sub_table[xi, eta],
                                                     G.sub_table[y, x]).data
    return _max(lhs - rhs)


def kn_rihaczek_residual(sigma: Symbol, f: Signal, g: Signal) -> float:
    """<K_sigma f, g> = <sigma, R(g, f)>."""
    return abs(kn_apply(sigma, f).inner(g) - sigma.inner(rihaczek(g, f)))


def rihaczek_stft_residual(f: Signal, g: Signal, phi: Signal, psi: Signal) -> float:
    """STFT of R(g, f) with window R(phi, psi) against its closed form, at every point."""
    direct = phase_stft(rihaczek(g, f), rihaczek(phi, psi))
    return _max(direct - stft_of_rihaczek_closed(f, g, phi, psi))


def key_identity_residual(sigma: Symbol, f: Signal, g: Signal, pairs=None) -> float:
    """<K_sigma pi(y) f, pi(x) g> = conj(<eta, x - y>) V_{R(g, f)} sigma((x, eta), J(y - x)).

    Here x = (x, xi) is the shift of the output window and y = (y, eta) the
    shift of the input.  ``pairs`` is an iterable of (x_flat, y_flat) phase
    indices; all pairs by default.
    """
    G = sigma.group
    n = G.order
    P = G.pairing_matrix
    S = G.sub_table
    V = phase_stft(sigma, rihaczek(g, f))
    K = kn_matrix(sigma).data
    shifts = [tf_shift_matrix(G, a, b) for a in range(n) for b in range(n)]
    if pairs is None:
        pairs = ((p, q) for p in range(n * n) for q in range(n * n))
    worst = 0.0
    for p, q in pairs:
        x, xi = divmod(p, n)
        y, eta = divmod(q, n)
        lhs = np.vdot(shifts[p] @ g.data, K @ (shifts[q] @ f.data))
        rhs = np.conj(P[eta, S[x, y]]) * V[x, eta, S[xi, eta], S[y, x]]
        worst = max(worst, abs(lhs - rhs))
    return float(worst)


def composition_residual(sigma: Symbol, tau: Symbol) -> float:
    """K of the twisted-convolution product against the matrix product."""
    lhs = kn_matrix(compose_symbols(sigma, tau)).data
    return _max(lhs - kn_matrix(sigma).data @ kn_matrix(tau).data)


def pure_shift_symbols(group: Group) -> list[Symbol]:
    n = group.order
    return [Symbol.tf_shift(group, x, xi) for x in range(n) for xi in range(n)]


# ---------------------------------------------------------------------------
# suites

TRANSFORM_IDENTITIES = ("plancherel", "commutation", "stft_fourier", "stft_covariance",
                        "stft_product_fourier", "rihaczek_covariance", "rihaczek_stft")


def transform_suite(group: Group, seeds=range(100)) -> dict:
    """Max residual of each transform identity over random inputs, one draw per seed."""
    worst = dict.fromkeys(TRANSFORM_IDENTITIES, 0.0)
    n = group.order
    t0 = time.perf_counter()
    for seed in seeds:
        rng = np.random.default_rng(seed)
        f, g, h, k = (Signal.random(group, rng) for _ in range(4))
        x, xi, y, eta = (int(i) for i in rng.integers(0, n, 4))
        res = {
            "plancherel": plancherel_residual(f),
            "commutation": commutation_residual(f, x, xi),
            "stft_fourier": stft_fourier_residual(f, g),
            "stft_covariance": stft_covariance_residual(f, g, x, xi, y, eta),
            "stft_product_fourier": stft_product_fourier_check(f, g, h, k),
            "rihaczek_covariance": rihaczek_covariance_residual(f, g, x, xi, y, eta),
            "rihaczek_stft": rihaczek_stft_residual(f, g, h, k),
        }
        for name, r in res.items():
            worst[name] = max(worst[name], r)
    return {"residuals": worst, "seconds": time.perf_counter() - t0}


def calculus_suite(group: Group, seeds=range(100)) -> dict:
    """Composition and KN/Rihaczek pairing over random symbols."""
    comp = pairing = 0.0
    for seed in seeds:
        rng = np.random.default_rng(seed)
        s = Symbol.random(group, rng)
        t = Symbol.random(group, rng)
        f, g = Signal.random(group, rng), Signal.random(group, rng)
        comp = max(comp, composition_residual(s, t))
        pairing = max(pairing, kn_rihaczek_residual(s, f, g))
    return {"composition": comp, "kn_rihaczek": pairing}
