"""Kohn-Nirenberg operators, spreading functions and the twisted convolution.

A symbol sigma lives on G x G^ and acts by

    K_sigma f(x) = (1/n) sum_xi sigma(x, xi) f^(xi) <xi, x>.

Its spreading function sigma^ is the phase-space Fourier transform (see
:func:`finitepsido.transforms.phase_fourier`), and with the package measures

    K_sigma = (1/n) sum_{omega, u} sigma^(omega, u) M_omega T_{-u}.
"""
from __future__ import annotations

import numpy as np

from . import kernels
from .group import Group, GroupMismatchError, Weight
from .transforms import (GhatxG, GxGhat, PhaseFunction, Signal, fourier, phase_fourier,
                         phase_inverse_fourier, stft, tf_shift_matrix)


class Symbol(PhaseFunction):
    """Kohn-Nirenberg symbol on G x G^."""

    def __init__(self, group: Group, data):
        super().__init__(group, data, GxGhat)

    @classmethod
    def identity(cls, group: Group) -> "Symbol":
        return cls(group, np.ones((group.order, group.order)))

    @classmethod
    def translation(cls, group: Group, a: int) -> "Symbol":
        """Symbol of T_a: sigma(x, xi) = conj(<xi, a>)."""
        row = np.conj(group.pairing_matrix[:, a])
        return cls(group, np.tile(row, (group.order, 1)))

    @classmethod
    def modulation(cls, group: Group, eta: int) -> "Symbol":
        """Symbol of M_eta: sigma(x, xi) = <eta, x>."""
        col = group.pairing_matrix[eta]
        return cls(group, np.tile(col[:, None], (1, group.order)))

    @classmethod
    def tf_shift(cls, group: Group, x: int, xi: int) -> "Symbol":
        """Symbol of pi(x, xi) = M_xi T_x."""
        return kn_symbol_from_matrix(OperatorMatrix(group, tf_shift_matrix(group, x, xi)))

    @classmethod
    def random(cls, group: Group, rng: np.random.Generator, decay: float = 1.0,
               scale: float = 1.0) -> "Symbol":
        """Random symbol whose spreading function has envelope exp(-decay d(omega, u))."""
        n = group.order
        d = group.phase_space().metric.reshape(n, n)
        spread = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) * np.exp(-decay * d)
        return inverse_spreading(SpreadingFunction(group, scale * spread))

    def __add__(self, other):
        self.group.check_same(other.group)
        return Symbol(self.group, self.data + other.data)

    def __mul__(self, c):
        return Symbol(self.group, self.data * c)

    __rmul__ = __mul__


class SpreadingFunction(PhaseFunction):
    """Spreading function on G^ x G."""

    def __init__(self, group: Group, data):
        super().__init__(group, data, GhatxG)

    @classmethod
    def identity(cls, group: Group) -> "SpreadingFunction":
        """Unit of the twisted convolution: |G| at (0, 0)."""
        d = np.zeros((group.order, group.order), dtype=np.complex128)
        d[0, 0] = group.order
        return cls(group, d)


class OperatorMatrix:
    """A linear map on signals over G, as a dense |G| x |G| matrix."""

    def __init__(self, group: Group, data):
        d = np.asarray(data, dtype=np.complex128)
        if d.shape != (group.order, group.order):
            raise GroupMismatchError(f"operator matrix of shape {d.shape} on {group!r}")
        self.group = group
        self.data = d

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            self.group.check_same(other.group)
            return OperatorMatrix(self.group, self.data @ other.data)
        if isinstance(other, Signal):
            return Signal(self.group, self.data @ other.data)
        return self.data @ other

    def __repr__(self):
        return f"OperatorMatrix({self.group!r})"


# ---------------------------------------------------------------------------


def kn_apply(sigma: Symbol, f: Signal) -> Signal:
    """Matrix-free K_sigma f."""
    sigma.group.check_same(f.group)
    G = f.group
    fh = fourier(f).data
    P = G.pairing_matrix
    out = (sigma.data * P.T * fh[None, :]).sum(axis=1) / G.order
    return Signal(G, out)


def kn_matrix(sigma: Symbol) -> OperatorMatrix:
    """K(x, y) = (1/n) sum_xi sigma(x, xi) <xi, x - y>."""
    G = sigma.group
    P = G.pairing_matrix
    return OperatorMatrix(G, (sigma.data * P.T) @ np.conj(P) / G.order)


def kn_symbol_from_matrix(K: OperatorMatrix) -> Symbol:
    """sigma(x, xi) = sum_y K(x, y) <xi, y - x>; inverse of :func:`kn_matrix`."""
    G = K.group
    P = G.pairing_matrix
    return Symbol(G, np.conj(P.T) * (K.data @ P.T))


def spreading(sigma: Symbol) -> SpreadingFunction:
    return SpreadingFunction(sigma.group, phase_fourier(sigma).data)


def inverse_spreading(F: SpreadingFunction) -> Symbol:
    return Symbol(F.group, phase_inverse_fourier(F).data)


def spreading_operator(F: SpreadingFunction) -> OperatorMatrix:
    """Dense (1/n) sum_{omega, u} F(omega, u) M_omega T_{-u}, assembled term by term."""
    G = F.group
    n = G.order
    out = np.zeros((n, n), dtype=np.complex128)
    for omega in range(n):
        for u in range(n):
            c = F.data[omega, u]
            if c != 0:
                out += c * tf_shift_matrix(G, G.neg[u], omega)
    return OperatorMatrix(G, out / n)


def twisted_convolution(F: SpreadingFunction, H: SpreadingFunction) -> SpreadingFunction:
    """(F # H)(xi, u) = (1/n) sum_{zeta, y} F(zeta, y) H(xi - zeta, u - y) <xi - zeta, y>."""
    F.group.check_same(H.group)
    G = F.group
    out = kernels.twisted_convolution(F.data, H.data, G.pairing_matrix, G.sub_table)
    return SpreadingFunction(G, out)


def compose_symbols(sigma: Symbol, tau: Symbol) -> Symbol:
    """Symbol of K_sigma K_tau via the twisted convolution of spreading functions."""
    return inverse_spreading(twisted_convolution(spreading(sigma), spreading(tau)))


def kn_rihaczek_pairing(sigma: Symbol, f: Signal, g: Signal) -> tuple[complex, complex]:
    """(<K_sigma f, g>, <sigma, R(g, f)>); equal for every sigma, f, g."""
    from .transforms import rihaczek
    return kn_apply(sigma, f).inner(g), sigma.inner(rihaczek(g, f))


# ---------------------------------------------------------------------------
# modulation spaces


def modulation_norm(f: Signal, g: Signal, p: float, q: float, m: Weight | None = None) -> float:
    """||V_g f * m||_{L^{p,q}}: inner L^p over G, outer L^q over G^."""
    V = np.abs(stft(f, g).data)
    G = f.group
    if m is not None:
        m.group.check_same(G.phase_space())
        V = V * m.values.reshape(G.order, G.order)
    if np.isinf(p):
        inner = V.max(axis=0)
    else:
        inner = (V ** p).sum(axis=0) ** (1.0 / p)
    dual_measure = 1.0 / G.order
    if np.isinf(q):
        return float(inner.max())
    return float((dual_measure * (inner ** q).sum()) ** (1.0 / q))


def probe_signals(group: Group, count: int = 100, seed: int = 0,
                  extra: list[np.ndarray] | None = None) -> list[Signal]:
    """Standard basis vectors, ``count`` seeded random signals, and any ``extra`` vectors."""
    rng = np.random.default_rng(seed)
    out = [Signal(group, np.eye(group.order)[i]) for i in range(group.order)]
    out += [Signal.random(group, rng) for _ in range(count)]
    for e in extra or []:
        out.append(Signal(group, e))
    return out


def kn_bound_on_modulation_space(sigma: Symbol, g: Signal, p: float, q: float,
                                 m: Weight | None = None, probes: list[Signal] | None = None,
                                 v: Weight | None = None) -> dict:
    """Empirical operator ratio of K_sigma on M^{p,q}_m.

    The probe set defaults to the standard basis, 100 seeded random signals,
    and the leading right singular vector of K_sigma.  Returns the maximal
    ratio together with the symbol's Sjostrand norm (window R(g, g), weight
    ``v`` or the base of ``m``) and their quotient.
    """
    from .sjostrand import sjostrand_norm
    from .group import constant_weight

    if not np.any(g.data):
        raise ValueError("window must be nonzero")
    G = sigma.group
    if m is not None and m.kind == "moderate" and not m.is_moderate():
        raise ValueError("weight is not moderate with respect to its declared base")
    if probes is None:
        K = kn_matrix(sigma).data
        _, _, vh = np.linalg.svd(K)
        probes = probe_signals(G, extra=[np.conj(vh[0])])
    best = 0.0
    for f in probes:
        den = modulation_norm(f, g, p, q, m)
        if den == 0:
            continue
        best = max(best, modulation_norm(kn_apply(sigma, f), g, p, q, m) / den)
    if v is None:
        v = m.base if (m is not None and m.base is not None) else (m or constant_weight(G.phase_space()))
    from .transforms import rihaczek
    snorm = sjostrand_norm(sigma, rihaczek(g, g), v)
    return {"ratio": best, "sjostrand_norm": snorm,
            "constant": best / snorm if snorm > 0 else float("inf")}
