"""Fourier transform, time-frequency shifts, STFT and Rihaczek distributions.

Measures: counting measure on G, ``1/|G|`` times counting measure on the dual
group, and the product measures on phase space (so both G x G^ and G^ x G
carry ``1/|G|`` times counting).  With this choice Fourier inversion and
Plancherel hold without extra constants, and every integral is a weighted
sum.  A :class:`Signal` on the dual side integrates with the dual measure.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .group import (DUAL, GROUP, DualPhasePoint, Element, Group, GroupMismatchError,
                    PhasePoint)

GxGhat = "G x G^"
GhatxG = "G^ x G"


def _other(side: str) -> str:
    return DUAL if side == GROUP else GROUP


@dataclass(frozen=True, eq=False)
class Signal:
    """A complex function on G (``side="group"``) or on G^ (``side="dual"``)."""

    group: Group
    data: np.ndarray
    side: str = GROUP

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.complex128).reshape(-1)
        if d.size != self.group.order:
            raise GroupMismatchError(f"signal of length {d.size} on a group of order {self.group.order}")
        object.__setattr__(self, "data", d)

    @property
    def measure(self) -> float:
        return 1.0 if self.side == GROUP else 1.0 / self.group.order

    def inner(self, other: "Signal") -> complex:
        _check_pair(self, other)
        return complex(self.measure * np.vdot(other.data, self.data))

    def norm(self) -> float:
        return float(np.sqrt(self.measure) * np.linalg.norm(self.data))

    def __add__(self, other):
        _check_pair(self, other)
        return Signal(self.group, self.data + other.data, self.side)

    def __sub__(self, other):
        _check_pair(self, other)
        return Signal(self.group, self.data - other.data, self.side)

    def __mul__(self, c):
        return Signal(self.group, self.data * c, self.side)

    __rmul__ = __mul__

    # constructors
    @classmethod
    def delta(cls, group: Group, at: int = 0, side: str = GROUP) -> "Signal":
        """Unit mass at ``at``: value 1 on G, value |G| on the dual side."""
        d = np.zeros(group.order, dtype=np.complex128)
        d[at] = 1.0 if side == GROUP else group.order
        return cls(group, d, side)

    @classmethod
    def constant(cls, group: Group, value: complex = 1.0, side: str = GROUP) -> "Signal":
        return cls(group, np.full(group.order, value, dtype=np.complex128), side)

    @classmethod
    def indicator(cls, group: Group, indices, side: str = GROUP) -> "Signal":
        d = np.zeros(group.order, dtype=np.complex128)
        d[np.asarray(indices)] = 1.0
        return cls(group, d, side)

    @classmethod
    def random(cls, group: Group, rng: np.random.Generator, side: str = GROUP,
               normalize: bool = True) -> "Signal":
        d = rng.standard_normal(group.order) + 1j * rng.standard_normal(group.order)
        s = cls(group, d, side)
        return s * (1.0 / s.norm()) if normalize else s


def _check_pair(f: Signal, g: Signal):
    f.group.check_same(g.group)
    if f.side != g.side:
        raise GroupMismatchError("signals live on different sides")


@dataclass(frozen=True, eq=False)
class PhaseFunction:
    """A function on G x G^ (``domain=GxGhat``) or G^ x G, stored as an (n, n) array."""

    group: Group
    data: np.ndarray
    domain: str = GxGhat

    def __post_init__(self):
        n = self.group.order
        d = np.asarray(self.data, dtype=np.complex128)
        if d.size != n * n:
            raise GroupMismatchError(f"phase function needs {n * n} values, got {d.size}")
        object.__setattr__(self, "data", d.reshape(n, n))
        if self.domain not in (GxGhat, GhatxG):
            raise ValueError(f"unknown domain {self.domain!r}")

    @property
    def measure(self) -> float:
        return 1.0 / self.group.order

    def inner(self, other: "PhaseFunction") -> complex:
        self.group.check_same(other.group)
        if self.domain != other.domain:
            raise GroupMismatchError("phase functions on different domains")
        return complex(self.measure * np.vdot(other.data, self.data))

    def norm(self) -> float:
        return float(np.sqrt(self.measure) * np.linalg.norm(self.data))

    def at(self, first: int, second: int) -> complex:
        return complex(self.data[first, second])


# ---------------------------------------------------------------------------
# Fourier transform


def fourier(f: Signal) -> Signal:
    """f^(xi) = integral of f(x) conj(<xi, x>) dx, landing on the opposite side."""
    P = f.group.pairing_matrix
    return Signal(f.group, f.measure * (np.conj(P) @ f.data), _other(f.side))


def inverse_fourier(F: Signal) -> Signal:
    """Inverse of :func:`fourier`: f(x) = integral of F(xi) <xi, x> dxi."""
    P = F.group.pairing_matrix
    return Signal(F.group, F.measure * (P @ F.data), _other(F.side))


# ---------------------------------------------------------------------------
# time-frequency shifts


def _shift_index(f: Signal, y) -> int:
    if isinstance(y, Element):
        f.group.check_same(y.group)
        if y.side != f.side:
            raise GroupMismatchError("translation must be by an element of the signal's own side")
        return y.index
    return f.group.index(np.atleast_1d(y))


def _mod_index(f: Signal, xi) -> int:
    if isinstance(xi, Element):
        f.group.check_same(xi.group)
        if xi.side == f.side:
            raise GroupMismatchError("modulation must be by an element of the opposite side")
        return xi.index
    return f.group.index(np.atleast_1d(xi))


def translate(f: Signal, y) -> Signal:
    """T_y f(x) = f(x - y)."""
    i = _shift_index(f, y)
    return Signal(f.group, f.data[f.group.sub_table[:, i]], f.side)


def modulate(f: Signal, xi) -> Signal:
    """M_xi f(x) = <xi, x> f(x)."""
    i = _mod_index(f, xi)
    return Signal(f.group, f.group.pairing_matrix[i] * f.data, f.side)


def tf_shift(f: Signal, p: PhasePoint | DualPhasePoint) -> Signal:
    """pi(x, xi) f = M_xi T_x f (for a dual-side signal, p is a point of G^ x G)."""
    if f.side == GROUP:
        if not isinstance(p, PhasePoint):
            raise GroupMismatchError("a signal on G is shifted by a point of G x G^")
        return modulate(translate(f, p.pos), p.freq)
    if not isinstance(p, DualPhasePoint):
        raise GroupMismatchError("a signal on G^ is shifted by a point of G^ x G")
    return modulate(translate(f, p.freq), p.pos)


def translation_matrix(group: Group, y: int) -> np.ndarray:
    n = group.order
    T = np.zeros((n, n))
    T[group.add_table[:, y], np.arange(n)] = 1.0
    return T


def modulation_matrix(group: Group, xi: int) -> np.ndarray:
    return np.diag(group.pairing_matrix[xi])


def tf_shift_matrix(group: Group, x: int, xi: int) -> np.ndarray:
    """Dense matrix of pi(x, xi) = M_xi T_x on signals over G."""
    return modulation_matrix(group, xi) @ translation_matrix(group, x)


# ---------------------------------------------------------------------------
# STFT


def stft(f: Signal, g: Signal) -> PhaseFunction:
    """V_g f(x, xi) = <f, M_xi T_x g>.

    For signals on G^ the result lives on G^ x G and uses the dual measure.
    """
    _check_pair(f, g)
    if not np.any(g.data):
        raise ValueError("STFT window must be nonzero")
    G = f.group
    W = f.data[None, :] * np.conj(g.data[G.sub_table.T])     # W[x, y] = f(y) conj g(y - x)
    V = f.measure * (W @ np.conj(G.pairing_matrix))
    return PhaseFunction(G, V, GxGhat if f.side == GROUP else GhatxG)


def stft_magnitude(f: Signal, g: Signal) -> np.ndarray:
    return np.abs(stft(f, g).data)


def moyal_residual(f: Signal, g: Signal) -> float:
    """| ||V_g f||^2 - ||f||^2 ||g||^2 | with the phase-space measure."""
    V = stft(f, g)
    return abs(V.norm() ** 2 - f.norm() ** 2 * g.norm() ** 2)


# ---------------------------------------------------------------------------
# phase space transforms


def phase_fourier(F: PhaseFunction) -> PhaseFunction:
    """Fourier transform on phase space.

    For F on G x G^:  F^(omega, u) = (1/n) sum F(x, xi) conj(<omega, x>) conj(<xi, u>),
    a function on G^ x G.  The same formula maps G^ x G back to G x G^.
    """
    Pc = np.conj(F.group.pairing_matrix)
    out = (Pc @ F.data @ Pc) * F.measure
    return PhaseFunction(F.group, out, GhatxG if F.domain == GxGhat else GxGhat)


def phase_inverse_fourier(F: PhaseFunction) -> PhaseFunction:
    P = F.group.pairing_matrix
    out = (P @ F.data @ P) * F.measure
    return PhaseFunction(F.group, out, GhatxG if F.domain == GxGhat else GxGhat)


def phase_translate(F: PhaseFunction, first: int, second: int) -> PhaseFunction:
    """T_(a, b) F(s, t) = F(s - a, t - b)."""
    sub = F.group.sub_table
    return PhaseFunction(F.group, F.data[np.ix_(sub[:, first], sub[:, second])], F.domain)


def phase_modulate(F: PhaseFunction, first: int, second: int) -> PhaseFunction:
    """M_(c, d) F(s, t) = <c, s> <t, d> F(s, t)."""
    P = F.group.pairing_matrix
    return PhaseFunction(F.group, F.data * np.outer(P[first], P[second]), F.domain)


def phase_stft(sigma: PhaseFunction, Psi: PhaseFunction) -> np.ndarray:
    """STFT of a function on G x G^ with window Psi.

    Returns V[x, xi, omega, u] = <sigma, M_(omega, u) T_(x, xi) Psi>, the
    second pair indexing G^ x G.
    """
    sigma.group.check_same(Psi.group)
    if sigma.domain != GxGhat or Psi.domain != GxGhat:
        raise GroupMismatchError("phase_stft expects functions on G x G^")
    if not np.any(Psi.data):
        raise ValueError("phase-space window must be nonzero")
    G = sigma.group
    return kernels.phase_stft(sigma.data, Psi.data, G.pairing_matrix, G.sub_table)


def phase_stft_at(sigma: PhaseFunction, Psi: PhaseFunction, x: int, xi: int,
                  omega: int, u: int) -> complex:
    """Single value of :func:`phase_stft`, by direct summation."""
    shifted = phase_modulate(phase_translate(Psi, x, xi), omega, u)
    return sigma.inner(shifted)


# ---------------------------------------------------------------------------
# Rihaczek distribution


def rihaczek(f: Signal, g: Signal) -> PhaseFunction:
    """R(f, g)(x, xi) = f(x) conj(g^(xi)) conj(<xi, x>)."""
    _check_pair(f, g)
    if f.side != GROUP:
        raise GroupMismatchError("Rihaczek distribution is defined for signals on G")
    gh = fourier(g).data
    P = f.group.pairing_matrix
    return PhaseFunction(f.group, f.data[:, None] * np.conj(gh)[None, :] * np.conj(P.T), GxGhat)


def stft_of_rihaczek(f: Signal, g: Signal, phi: Signal, psi: Signal,
                     p: PhasePoint, w: DualPhasePoint) -> tuple[complex, complex]:
    """STFT of R(g, f) with window R(phi, psi) at (p, w), two ways.

    Returns ``(direct, closed_form)`` where the closed form is
    conj(<xi, u>) V_phi g(x, xi + omega) conj(V_psi f(x + u, xi)).
    """
    if not np.any(phi.data) or not np.any(psi.data):
        raise ValueError("windows must be nonzero")
    G = f.group
    x, xi = p.pos.index, p.freq.index
    omega, u = w.freq.index, w.pos.index
    direct = phase_stft_at(rihaczek(g, f), rihaczek(phi, psi), x, xi, omega, u)
    Vg = stft(g, phi).data
    Vf = stft(f, psi).data
    closed = (np.conj(G.pairing_matrix[xi, u]) * Vg[x, G.add_table[xi, omega]]
              * np.conj(Vf[G.add_table[x, u], xi]))
    return direct, complex(closed)


def stft_of_rihaczek_closed(f: Signal, g: Signal, phi: Signal, psi: Signal) -> np.ndarray:
    """Full array of the closed form over all (x, xi, omega, u)."""
    G = f.group
    n = G.order
    Vg = stft(g, phi).data
    Vf = stft(f, psi).data
    A = G.add_table
    x = np.arange(n)[:, None, None, None]
    xi = np.arange(n)[None, :, None, None]
    om = np.arange(n)[None, None, :, None]
    u = np.arange(n)[None, None, None, :]
    return (np.conj(G.pairing_matrix[xi, u]) * Vg[x, A[xi, om]] * np.conj(Vf[A[x, u], xi]))
