"""Sjostrand norm, Gabor matrices, the C_v matrix algebra and the Wiener experiment.

Conventions
-----------
* The Sjostrand norm of a symbol is
  ``(1/n) sum_{omega in G^ x G} sup_{x in G x G^} |V_Psi sigma(x, omega)| v(J^{-1} omega)``.
* The Gabor matrix is ``M(sigma)[m, n] = <K_sigma pi(n) g, pi(m) g>`` over a lattice
  Lambda.  For the window Psi = R(g, g),

      <K_sigma pi(y) g, pi(x) g> = conj(<eta, x - y>) V_Psi sigma((x, eta), J(y - x)),

  so the lattice envelope ``h(k) = sup_z |V_Psi sigma(z, J(-k))|`` dominates
  ``|M(sigma)[m, n]|`` by ``h(m - n)``.
* C_v matrices are indexed by the lattice as an abstract group; the envelope is
  ``d(k) = max_i |A[i, i - k]|`` and the norm is ``sum_k d(k) v(k)``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .gabor import GaborSystem, frame_bounds
from .group import (Group, GroupMismatchError, Lattice, Weight, constant_weight,
                    phase_weight_on_dual, restrict_weight, tensor_weight)
from .psido import OperatorMatrix, Symbol, kn_matrix, kn_symbol_from_matrix
from .transforms import GxGhat, PhaseFunction, phase_stft, rihaczek

PINV_RTOL = 1e-10
RANK_GAP = 10.0


class SingularOperatorError(ValueError):
    pass


class RankDecisionError(RuntimeError):
    """The singular-value gap around the rank threshold is too small to trust."""


# ---------------------------------------------------------------------------
# Sjostrand norm


def column_sup(sigma: Symbol, Psi: PhaseFunction) -> np.ndarray:
    """sup over x in G x G^ of |V_Psi sigma(x, omega)|, as an (n, n) array over G^ x G."""
    return kernels.envelope_sup(phase_stft(sigma, Psi))


def sjostrand_norm(sigma: Symbol, Psi: PhaseFunction, v: Weight | None = None) -> float:
    """Weighted M^{inf,1} norm with weight v(J^{-1} omega); v is a weight on G x G^."""
    G = sigma.group
    if not np.any(Psi.data):
        raise ValueError("window must be nonzero")
    if v is None:
        v = constant_weight(G.phase_space())
    w = phase_weight_on_dual(v, G)
    return float((column_sup(sigma, Psi) * w).sum() / G.order)


def default_window(g) -> PhaseFunction:
    """Psi = R(g, g)."""
    return rihaczek(g, g)


def section6_windows(group: Group) -> tuple[PhaseFunction, PhaseFunction]:
    """(delta (x) 1, 1 (x) delta) on G x G^, each delta of unit mass for its measure."""
    if group.rank != 1:
        raise GroupMismatchError("section-6 windows are defined for a single cyclic factor")
    n = group.order
    a = np.zeros((n, n), dtype=np.complex128)
    a[0, :] = 1.0
    b = np.zeros((n, n), dtype=np.complex128)
    b[:, 0] = n
    return PhaseFunction(group, a, GxGhat), PhaseFunction(group, b, GxGhat)


# ---------------------------------------------------------------------------
# C_v algebra


@dataclass
class Envelope:
    """Nonnegative function over an index group with its weighted mass."""

    group: Group
    values: np.ndarray
    weight: Weight

    @property
    def mass(self) -> float:
        return float(np.sum(self.values * self.weight.values))

    def dominates(self, A: np.ndarray, rtol: float = 1e-12, atol: float = 1e-14) -> dict:
        """Entrywise check |A[i, j]| <= h(i - j); returns counts and the worst ratio."""
        bound = self.values[self.group.sub_table]
        mag = np.abs(A)
        slack = bound * (1 + rtol) + atol
        viol = int(np.count_nonzero(mag > slack))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(bound > 0, mag / bound, np.where(mag > atol, np.inf, 0.0))
        return {"violations": viol, "max_ratio": float(ratio.max()), "entries": int(mag.size)}

    def decay_curve(self) -> list[tuple[int, float]]:
        """(distance r, max envelope over elements at metric distance r)."""
        d = self.group.metric
        return [(int(r), float(self.values[d == r].max())) for r in np.unique(d)]

    def as_dict(self) -> dict:
        return {"index": [list(map(int, c)) for c in self.group.coords],
                "values": [float(x) for x in self.values], "mass": self.mass}


@dataclass
class CvMatrix:
    """Square matrix over the index group ``group`` with weight ``weight``."""

    group: Group
    entries: np.ndarray
    weight: Weight

    def __post_init__(self):
        m = self.group.order
        self.entries = np.asarray(self.entries, dtype=np.complex128)
        if self.entries.shape != (m, m):
            raise GroupMismatchError(f"C_v matrix shape {self.entries.shape} over a group of order {m}")
        self.weight.group.check_same(self.group)

    def envelope(self) -> Envelope:
        return cv_envelope(self.entries, self.group, self.weight)

    @property
    def norm(self) -> float:
        return self.envelope().mass

    def __matmul__(self, other: "CvMatrix") -> "CvMatrix":
        self.group.check_same(other.group)
        return CvMatrix(self.group, self.entries @ other.entries, self.weight)


def cv_envelope(A: np.ndarray, group: Group, v: Weight | None = None) -> Envelope:
    """d(k) = max_i |A[i, i - k]|."""
    v = v if v is not None else constant_weight(group)
    d = kernels.diagonal_envelope(A, group.sub_table)
    return Envelope(group, d, v)


def cv_norm(A: np.ndarray, group: Group, v: Weight | None = None) -> float:
    return cv_envelope(A, group, v).mass


def lattice_cv(A: np.ndarray, lattice: Lattice, v: Weight) -> CvMatrix:
    """Wrap a lattice-indexed matrix; v may be given on G x G^ or on the lattice."""
    if v.group.moduli != lattice.index_group.moduli:
        v = restrict_weight(v, lattice)
    return CvMatrix(lattice.index_group, A, v)


def _svd_rank(s: np.ndarray, rtol: float):
    thresh = rtol * (s[0] if s.size else 0.0)
    keep = s > thresh
    rank = int(keep.sum())
    kept_min = float(s[rank - 1]) if rank else 0.0
    dropped_max = float(s[rank]) if rank < s.size else 0.0
    ambiguous = (rank > 0 and kept_min < RANK_GAP * thresh) or (dropped_max > thresh / RANK_GAP)
    return rank, thresh, kept_min, dropped_max, ambiguous


def cv_inverse(A: CvMatrix, rtol: float = PINV_RTOL) -> CvMatrix:
    s = np.linalg.svd(A.entries, compute_uv=False)
    if s[-1] <= rtol * s[0]:
        raise SingularOperatorError(f"smallest singular value {s[-1]:.3e} vs largest {s[0]:.3e}")
    return CvMatrix(A.group, np.linalg.inv(A.entries), A.weight)


@dataclass
class PseudoInverse:
    matrix: CvMatrix
    rank: int
    threshold: float
    smallest_kept: float
    largest_dropped: float
    ambiguous: bool


def cv_pseudoinverse(A: CvMatrix, rtol: float = PINV_RTOL) -> PseudoInverse:
    """Moore-Penrose inverse by SVD with relative threshold ``rtol``.

    ``ambiguous`` is set when the singular values on either side of the
    threshold are within a factor 10 of it.
    """
    U, s, Vh = np.linalg.svd(A.entries)
    rank, thresh, kept, dropped, ambiguous = _svd_rank(s, rtol)
    X = (Vh[:rank].conj().T / s[:rank]) @ U[:, :rank].conj().T
    return PseudoInverse(CvMatrix(A.group, X, A.weight), rank, thresh, kept, dropped, ambiguous)


def penrose_residuals(A: np.ndarray, X: np.ndarray) -> dict:
    """Max-norm residuals of the four Moore-Penrose identities for X as A^+."""
    AX, XA = A @ X, X @ A
    return {
        "AXA=A": float(np.abs(AX @ A - A).max()),
        "XAX=X": float(np.abs(XA @ X - X).max()),
        "AX hermitian": float(np.abs(AX - AX.conj().T).max()),
        "XA hermitian": float(np.abs(XA - XA.conj().T).max()),
    }


# ---------------------------------------------------------------------------
# Gabor matrix


@dataclass
class GaborMatrix:
    system: GaborSystem
    entries: np.ndarray

    @property
    def lattice(self) -> Lattice:
        return self.system.lattice

    def intertwining_residual(self, sigma: Symbol, f) -> float:
        """max |C_g K_sigma f - M(sigma) C_g f|."""
        C = self.system.analysis_matrix
        K = kn_matrix(sigma).data
        return float(np.abs(C @ (K @ f.data) - self.entries @ (C @ f.data)).max())

    def factorization_residual(self, sigma: Symbol) -> float:
        """max |K_sigma - C_g^* M(sigma) C_g| entrywise."""
        C = self.system.analysis_matrix
        return float(np.abs(kn_matrix(sigma).data - C.conj().T @ self.entries @ C).max())

    def range_residuals(self) -> dict:
        """M maps ran(C_g) into itself and kills ker(C_g^*): P M P = M, with P = C C^*."""
        C = self.system.analysis_matrix
        P = C @ C.conj().T
        M = self.entries
        return {"ran": float(np.abs(P @ M - M).max()), "ker": float(np.abs(M @ P - M).max())}


def gabor_matrix(sigma: Symbol, sys: GaborSystem, check_tight: bool = True) -> GaborMatrix:
    """M(sigma)[m, n] = <K_sigma pi(n) g, pi(m) g>."""
    sigma.group.check_same(sys.group)
    if check_tight:
        fb = frame_bounds(sys)
        if not (fb.is_tight and abs(fb.upper_bound - 1) < 1e-8):
            warnings.warn("Gabor matrix of a system that is not a tight frame with bound 1",
                          stacklevel=2)
    A = sys.atoms
    return GaborMatrix(sys, A.conj().T @ kn_matrix(sigma).data @ A)


def all_shift_matrix(sigma: Symbol, g) -> np.ndarray:
    """<K_sigma pi(z) g, pi(y) g> over all phase points, indexed [y, z]."""
    full = GaborSystem(g, Lattice.full(sigma.group))
    A = full.atoms
    return A.conj().T @ kn_matrix(sigma).data @ A


# ---------------------------------------------------------------------------
# almost diagonalization


def _weight_on(v: Weight | None, group: Group) -> Weight:
    if v is None:
        return constant_weight(group)
    v.group.check_same(group)
    return v


def continuous_envelope(sigma: Symbol, g, v: Weight | None = None) -> Envelope:
    """H(x) = sup_z |V_Psi sigma(z, J(-x))| over all of G x G^, with Psi = R(g, g)."""
    G = sigma.group
    PG = G.phase_space()
    sup = column_sup(sigma, default_window(g)).reshape(-1)          # over G^ x G
    # J(-x) for x = (a, b) is (b, -a); flat index b * n + (-a)
    n = G.order
    a = np.repeat(np.arange(n), n)
    b = np.tile(np.arange(n), n)
    H = sup[b * n + G.neg[a]]
    return Envelope(PG, H, _weight_on(v, PG))


def almost_diag_envelope(sigma: Symbol, sys: GaborSystem, v: Weight | None = None) -> Envelope:
    """Lattice envelope h(k) = H(k) for k in Lambda, indexed by the lattice group."""
    PG = sys.lattice.phase_group
    H = continuous_envelope(sigma, sys.window, _weight_on(v, PG))
    lw = restrict_weight(H.weight, sys.lattice)
    return Envelope(sys.lattice.index_group, H.values[sys.lattice.points], lw)


def window_alpha(sys: GaborSystem) -> np.ndarray:
    """alpha(n) = sup_{u in U} |V_g g(n - u)| over lattice points n."""
    from .transforms import stft
    V = np.abs(stft(sys.window, sys.window).data).reshape(-1)
    PG = sys.lattice.phase_group
    diff = PG.sub_table[np.ix_(sys.lattice.points, sys.lattice.fundamental_domain)]
    return V[diff].max(axis=1)


def group_convolve(a: np.ndarray, b: np.ndarray, group: Group) -> np.ndarray:
    """(a * b)(k) = sum_j a(j) b(k - j)."""
    return (a[None, :] * b[group.sub_table]).sum(axis=1)


@dataclass
class ReverseEnvelope:
    """The (iii) => (ii) construction: c = h * alpha * alpha~ and H = sum_n c(n) chi_{U-U}(. - n)."""

    lattice_part: Envelope
    H: Envelope
    alpha: np.ndarray

    def check(self, sigma: Symbol, g) -> dict:
        """Test |<K pi(z) g, pi(y) g>| <= H(y - z) over all pairs of phase points."""
        M = all_shift_matrix(sigma, g)
        return self.H.dominates(M, rtol=1e-10, atol=1e-12)


def reverse_envelope(h: Envelope, sys: GaborSystem, v: Weight | None = None) -> ReverseEnvelope:
    L = sys.lattice
    Lg = L.index_group
    alpha = window_alpha(sys)
    alpha_t = alpha[Lg.neg]
    c = group_convolve(group_convolve(h.values, alpha, Lg), alpha_t, Lg)
    PG = L.phase_group
    # U - U in phase space
    Uidx = L.fundamental_domain
    UmU = np.zeros(PG.order, dtype=bool)
    UmU[np.unique(PG.sub_table[np.ix_(Uidx, Uidx)])] = True
    H = np.zeros(PG.order)
    for k, lam in enumerate(L.points):
        if c[k] == 0:
            continue
        H[PG.add_table[lam, np.nonzero(UmU)[0]]] += c[k]
    vw = _weight_on(v, PG)
    return ReverseEnvelope(Envelope(Lg, c, h.weight), Envelope(PG, H, vw), alpha)


# ---------------------------------------------------------------------------
# Wiener experiment


@dataclass
class WienerReport:
    residual_inverse: float
    residual_pinv: float
    penrose: dict
    range_residuals: dict
    rank: int
    lattice_size: int
    condition_number: float
    sjostrand_sigma: float
    sjostrand_tau: float
    cv_sigma: float
    cv_tau: float
    envelope_sigma: Envelope = field(repr=False)
    envelope_tau: Envelope = field(repr=False)
    tau: Symbol = field(repr=False)
    passed: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "residual_inverse": self.residual_inverse,
            "residual_pinv": self.residual_pinv,
            "penrose": self.penrose,
            "range_residuals": self.range_residuals,
            "rank": self.rank,
            "lattice_size": self.lattice_size,
            "condition_number": self.condition_number,
            "sjostrand_norm_sigma": self.sjostrand_sigma,
            "sjostrand_norm_tau": self.sjostrand_tau,
            "cv_norm_sigma": self.cv_sigma,
            "cv_norm_tau": self.cv_tau,
            "decay_sigma": self.envelope_sigma.decay_curve(),
            "decay_tau": self.envelope_tau.decay_curve(),
            "passed": self.passed,
        }


def wiener_experiment(sigma: Symbol, sys: GaborSystem, v: Weight | None = None,
                      inverse_tol: float = 1e-10, pinv_tol: float = 1e-8) -> WienerReport:
    """Invert K_sigma, recover tau, and compare M(tau) against M(sigma)^+.

    ``sys`` must be a tight frame with bound 1.  Raises
    :class:`SingularOperatorError` if K_sigma is not invertible and
    :class:`RankDecisionError` if the pseudoinverse rank is ambiguous.
    """
    G = sigma.group
    PG = G.phase_space()
    v = _weight_on(v, PG)
    K = kn_matrix(sigma).data
    s = np.linalg.svd(K, compute_uv=False)
    if s[-1] <= PINV_RTOL * s[0]:
        raise SingularOperatorError("K_sigma is not invertible on L^2(G)")
    Kinv = np.linalg.inv(K)
    tau = kn_symbol_from_matrix(OperatorMatrix(G, Kinv))
    res_inv = float(np.abs(kn_matrix(tau).data @ K - np.eye(G.order)).max())

    Ms = gabor_matrix(sigma, sys)
    Mt = gabor_matrix(tau, sys, check_tight=False)
    Cs = lattice_cv(Ms.entries, sys.lattice, v)
    Ct = lattice_cv(Mt.entries, sys.lattice, v)
    pinv = cv_pseudoinverse(Cs)
    if pinv.ambiguous:
        raise RankDecisionError(
            f"rank {pinv.rank}: kept {pinv.smallest_kept:.3e}, dropped {pinv.largest_dropped:.3e}, "
            f"threshold {pinv.threshold:.3e}")
    res_pinv = float(np.abs(pinv.matrix.entries - Mt.entries).max())
    penrose = penrose_residuals(Ms.entries, Mt.entries)

    Psi = default_window(sys.window)
    ns = sjostrand_norm(sigma, Psi, v)
    nt = sjostrand_norm(tau, Psi, v)
    passed = {
        "inverse": res_inv < inverse_tol,
        "pseudoinverse": res_pinv < pinv_tol and max(penrose.values()) < pinv_tol,
        "finite_norms": bool(np.isfinite([ns, nt, Cs.norm, Ct.norm]).all()),
    }
    return WienerReport(res_inv, res_pinv, penrose, Mt.range_residuals(), pinv.rank,
                        sys.lattice.size, float(s[0] / s[-1]), ns, nt, Cs.norm, Ct.norm,
                        Cs.envelope(), Ct.envelope(), tau, passed)


# ---------------------------------------------------------------------------
# single cyclic factor: explicit matrices


def _single_factor(sigma: Symbol):
    if sigma.group.rank != 1:
        raise GroupMismatchError("defined for a single cyclic factor Z_N")


def partial_inverse_fourier_2(sigma: Symbol) -> np.ndarray:
    """F_2^{-1} sigma(x, u) = (1/n) sum_xi sigma(x, xi) <xi, u>."""
    P = sigma.group.pairing_matrix
    return sigma.data @ P / sigma.group.order


def partial_fourier_1(sigma: Symbol) -> np.ndarray:
    """F_1 sigma(omega, xi) = sum_x sigma(x, xi) conj(<omega, x>)."""
    return np.conj(sigma.group.pairing_matrix) @ sigma.data


def discrete_case_matrix(sigma: Symbol) -> np.ndarray:
    """A[x, y] = F_2^{-1} sigma(x, x - y); equals the matrix of K_sigma."""
    _single_factor(sigma)
    G = sigma.group
    F2 = partial_inverse_fourier_2(sigma)
    x = np.arange(G.order)[:, None]
    return F2[x, G.sub_table]


def periodic_case_matrix(sigma: Symbol) -> np.ndarray:
    """A[xi, omega] = F_1 sigma(xi - omega, omega).

    A is the kernel of F K_sigma F^{-1} with respect to the dual measure:
    (F K_sigma f)(xi) = (1/n) sum_omega A[xi, omega] f^(omega).
    """
    _single_factor(sigma)
    G = sigma.group
    F1 = partial_fourier_1(sigma)
    w = np.arange(G.order)[None, :]
    return F1[G.sub_table, w]


def section6_norms(sigma: Symbol, v: Weight) -> dict:
    """Both sides of the exact norm identities for the discrete and periodic matrices.

    ``v`` is a weight on Z_N; the symbol norms use v (x) 1 and 1 (x) v on G x G^.
    """
    _single_factor(sigma)
    G = sigma.group
    v.group.check_same(G)
    one = constant_weight(G)
    d_win, p_win = section6_windows(G)
    A = discrete_case_matrix(sigma)
    B = periodic_case_matrix(sigma)
    return {
        "discrete_cv": cv_norm(A, G, v),
        "discrete_symbol": sjostrand_norm(sigma, d_win, tensor_weight(v, one)),
        "periodic_cv": cv_norm(B, G, v),
        "periodic_symbol": sjostrand_norm(sigma, p_win, tensor_weight(one, v)),
    }
