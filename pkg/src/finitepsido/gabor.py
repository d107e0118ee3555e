"""Gabor systems over phase-space lattices."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .group import Group, GroupMismatchError, Lattice, Subgroup
from .transforms import Signal, tf_shift_matrix

FRAME_RTOL = 1e-10        # is_frame iff A > FRAME_RTOL * B
TIGHT_RTOL = 1e-10        # is_tight iff B - A <= TIGHT_RTOL * B
EIG_FLOOR = 1e-12         # S^{-1/2} rejects eigenvalues below EIG_FLOOR * max


class NotAFrameError(ValueError):
    pass


@dataclass(frozen=True)
class FrameDiagnostics:
    lower_bound: float
    upper_bound: float
    is_frame: bool
    is_tight: bool
    redundancy: float

    def as_dict(self) -> dict:
        return {"A": self.lower_bound, "B": self.upper_bound, "is_frame": self.is_frame,
                "is_tight": self.is_tight, "redundancy": self.redundancy}


@dataclass(frozen=True, eq=False)
class GaborSystem:
    """{pi(m) g : m in Lambda}; coefficient arrays follow the lattice enumeration."""

    window: Signal
    lattice: Lattice

    def __post_init__(self):
        self.window.group.check_same(self.lattice.group)
        if self.window.side != "group":
            raise GroupMismatchError("Gabor windows live on G")

    @property
    def group(self) -> Group:
        return self.window.group

    @cached_property
    def atoms(self) -> np.ndarray:
        """(|G|, |Lambda|) matrix whose columns are pi(m) g; this is C_g^*."""
        G = self.group
        pos, freq = self.lattice.pos_freq
        g = self.window.data
        cols = g[G.sub_table[:, pos]] * G.pairing_matrix[freq].T
        return np.ascontiguousarray(cols)

    @property
    def analysis_matrix(self) -> np.ndarray:
        return self.atoms.conj().T


def analysis(sys: GaborSystem, f: Signal) -> np.ndarray:
    """c(m) = <f, pi(m) g>."""
    sys.group.check_same(f.group)
    return sys.analysis_matrix @ f.data


def synthesis(sys: GaborSystem, c) -> Signal:
    """sum_m c(m) pi(m) g."""
    c = np.asarray(c, dtype=np.complex128)
    if c.shape != (sys.lattice.size,):
        raise GroupMismatchError(f"expected {sys.lattice.size} coefficients, got {c.shape}")
    return Signal(sys.group, sys.atoms @ c)


def frame_operator(sys: GaborSystem) -> np.ndarray:
    """S = C_g^* C_g as a dense Hermitian matrix."""
    A = sys.atoms
    S = A @ A.conj().T
    return (S + S.conj().T) / 2


def frame_bounds(sys: GaborSystem) -> FrameDiagnostics:
    ev = np.linalg.eigvalsh(frame_operator(sys))
    A, B = max(float(ev[0]), 0.0), float(ev[-1])
    is_frame = B > 0 and A > FRAME_RTOL * B
    is_tight = is_frame and (B - A) <= TIGHT_RTOL * B
    return FrameDiagnostics(A, B, is_frame, is_tight, sys.lattice.redundancy)


def tight_window(sys: GaborSystem) -> Signal:
    """S^{-1/2} g, rescaled so that both frame bounds equal 1."""
    w, V = np.linalg.eigh(frame_operator(sys))
    if w[-1] <= 0 or w[0] <= EIG_FLOOR * w[-1]:
        raise NotAFrameError(f"not a frame: eigenvalues in [{w[0]:.3e}, {w[-1]:.3e}]")
    root = (V * w ** -0.5) @ V.conj().T
    gamma = Signal(sys.group, root @ sys.window.data)
    new = frame_bounds(GaborSystem(gamma, sys.lattice))
    return gamma * (1.0 / math.sqrt(new.lower_bound))


def dual_window(sys: GaborSystem) -> Signal:
    """Canonical dual S^{-1} g."""
    S = frame_operator(sys)
    w = np.linalg.eigvalsh(S)
    if w[-1] <= 0 or w[0] <= EIG_FLOOR * w[-1]:
        raise NotAFrameError(f"not a frame: eigenvalues in [{w[0]:.3e}, {w[-1]:.3e}]")
    return Signal(sys.group, np.linalg.solve(S, sys.window.data))


def tight_system(sys: GaborSystem) -> GaborSystem:
    return GaborSystem(tight_window(sys), sys.lattice)


def lattice_commutation_defect(sys: GaborSystem) -> float:
    """max over lattice points of ||S pi(m) - pi(m) S||."""
    S = frame_operator(sys)
    pos, freq = sys.lattice.pos_freq
    worst = 0.0
    for x, xi in zip(pos, freq):
        T = tf_shift_matrix(sys.group, x, xi)
        worst = max(worst, float(np.linalg.norm(S @ T - T @ S, 2)))
    return worst


# ---------------------------------------------------------------------------
# windows


def delta_window(group: Group) -> Signal:
    return Signal.delta(group)


def gaussian_window(group: Group, width=None) -> Signal:
    """Periodized discrete Gaussian, a tensor product over the cyclic factors.

    ``width`` defaults to sqrt(N_j) per factor, which makes the window nearly
    invariant under the Fourier transform.  Normalized to unit norm.
    """
    if width is None:
        width = [math.sqrt(m) for m in group.moduli]
    width = np.broadcast_to(np.asarray(width, dtype=float), (group.rank,))
    g = np.ones(group.order)
    for j, (m, w) in enumerate(zip(group.moduli, width)):
        x = group.coords[:, j].astype(float)
        vals = sum(np.exp(-np.pi * ((x + k * m) / w) ** 2) for k in range(-3, 4))
        g = g * vals
    s = Signal(group, g)
    return s * (1.0 / s.norm())


def subgroup_indicator_window(group: Group, steps, normalize: bool = True) -> Signal:
    """chi_K for K = prod steps_j Z_{N_j}, optionally scaled to unit norm."""
    K = Subgroup(group, tuple(steps))
    s = Signal.indicator(group, K.indices)
    return s * (1.0 / math.sqrt(K.order)) if normalize else s


def random_window(group: Group, rng: np.random.Generator) -> Signal:
    return Signal.random(group, rng)


def onb_system(group: Group, subgroup_steps) -> GaborSystem:
    """Orthonormal basis {M_delta T_d chi_K} with K = prod c_j Z_{N_j}.

    Translations run over a complement of K and modulations over a complement
    of the annihilator, which requires gcd(c_j, N_j / c_j) = 1 for every factor.
    """
    steps = tuple(int(c) for c in subgroup_steps)
    pos, freq = [], []
    for c, m in zip(steps, group.moduli):
        if m % c:
            raise ValueError(f"step {c} does not divide {m}")
        k = m // c
        if math.gcd(c, k) != 1:
            raise ValueError(f"Z_{m}: subgroup {c}Z has no complement (gcd({c}, {k}) != 1)")
        pos.append(k)
        freq.append(c)
    lattice = Lattice(group, tuple(pos), tuple(freq))
    return GaborSystem(subgroup_indicator_window(group, steps), lattice)
