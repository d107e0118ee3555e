"""Finite abelian groups as products of cyclic factors.

A group ``Group((N_1, ..., N_d))`` enumerates its elements lexicographically
over the coordinates; every array in the package is indexed by this order.
The dual group is identified with the group itself through the pairing

    <xi, x> = exp(2 pi i sum_j xi_j x_j / N_j)

and carries a ``side`` tag only to keep the two roles apart.  Phase space
G x G^ is again a product of cyclic groups, ``group.phase_space()``, whose
flat index is ``x_index * |G| + xi_index``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

GROUP = "group"
DUAL = "dual"


class GroupMismatchError(ValueError):
    """Raised when objects over different moduli (or sides) are combined."""


@dataclass(frozen=True)
class Group:
    """The group Z_{N_1} x ... x Z_{N_d}."""

    moduli: tuple[int, ...]

    def __post_init__(self):
        moduli = tuple(int(m) for m in self.moduli)
        if not moduli:
            raise ValueError("a group needs at least one cyclic factor")
        if any(m < 1 for m in moduli):
            raise ValueError(f"moduli must be positive, got {moduli}")
        object.__setattr__(self, "moduli", moduli)

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    def __len__(self):
        return self.order

    def __repr__(self):
        return "Group(" + " x ".join(f"Z{m}" for m in self.moduli) + ")"

    # -- enumeration ---------------------------------------------------
    @cached_property
    def coords(self) -> np.ndarray:
        """(order, rank) integer array of coordinates in enumeration order."""
        grids = np.indices(self.moduli).reshape(self.rank, -1)
        return np.ascontiguousarray(grids.T)

    def index(self, coords) -> int | np.ndarray:
        c = np.asarray(coords, dtype=np.int64)
        c = np.mod(c, self.moduli)
        if c.ndim == 1:
            return int(np.ravel_multi_index(tuple(c), self.moduli))
        return np.ravel_multi_index(tuple(c.T), self.moduli)

    def element(self, coords, side: str = GROUP) -> "Element":
        if np.isscalar(coords):
            coords = (coords,)
        return Element(self, tuple(int(c) for c in coords), side)

    def element_at(self, index: int, side: str = GROUP) -> "Element":
        return Element(self, tuple(int(c) for c in self.coords[index]), side)

    def zero(self, side: str = GROUP) -> "Element":
        return Element(self, (0,) * self.rank, side)

    # -- arithmetic tables ---------------------------------------------
    @cached_property
    def add_table(self) -> np.ndarray:
        """add_table[i, j] = index(element_i + element_j)."""
        c = self.coords
        s = (c[:, None, :] + c[None, :, :]) % np.asarray(self.moduli)
        return self.index(s.reshape(-1, self.rank)).reshape(self.order, self.order)

    @cached_property
    def sub_table(self) -> np.ndarray:
        """sub_table[i, j] = index(element_i - element_j)."""
        c = self.coords
        s = (c[:, None, :] - c[None, :, :]) % np.asarray(self.moduli)
        return self.index(s.reshape(-1, self.rank)).reshape(self.order, self.order)

    @cached_property
    def neg(self) -> np.ndarray:
        return self.index((-self.coords) % np.asarray(self.moduli))

    @cached_property
    def pairing_matrix(self) -> np.ndarray:
        """P[xi, x] = <xi, x>.  Symmetric, since G^ is identified with G."""
        # reduce the phase exactly in integers before exponentiating
        num = np.zeros((self.order, self.order), dtype=np.int64)
        lcm = math.lcm(*self.moduli)
        for j, m in enumerate(self.moduli):
            num += np.outer(self.coords[:, j], self.coords[:, j]) * (lcm // m)
        num %= lcm
        return np.exp(2j * np.pi * num / lcm)

    @cached_property
    def metric(self) -> np.ndarray:
        """Sum over coordinates of the circular distance to 0."""
        c = self.coords
        m = np.asarray(self.moduli)
        return np.minimum(c, m - c).sum(axis=1)

    @cached_property
    def element_orders(self) -> np.ndarray:
        out = np.ones(self.order, dtype=np.int64)
        for j, m in enumerate(self.moduli):
            cj = self.coords[:, j]
            oj = m // np.gcd(cj, m)
            out = np.lcm(out, oj)
        return out

    # -- derived groups ------------------------------------------------
    def phase_space(self) -> "Group":
        """G x G^ as a group (also used for G^ x G: the moduli coincide)."""
        return Group(self.moduli + self.moduli)

    def check_same(self, other: "Group"):
        if self.moduli != other.moduli:
            raise GroupMismatchError(f"{self!r} vs {other!r}")


@dataclass(frozen=True)
class Element:
    group: Group
    coords: tuple[int, ...]
    side: str = GROUP

    def __post_init__(self):
        if len(self.coords) != self.group.rank:
            raise GroupMismatchError(
                f"{len(self.coords)} coordinates for a rank-{self.group.rank} group")
        reduced = tuple(int(c) % m for c, m in zip(self.coords, self.group.moduli))
        object.__setattr__(self, "coords", reduced)
        if self.side not in (GROUP, DUAL):
            raise ValueError(f"unknown side {self.side!r}")

    def _check(self, other: "Element"):
        self.group.check_same(other.group)
        if self.side != other.side:
            raise GroupMismatchError("cannot combine group and dual-group elements")

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)), self.side)

    def __sub__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(self.group, tuple(a - b for a, b in zip(self.coords, other.coords)), self.side)

    def __neg__(self) -> "Element":
        return Element(self.group, tuple(-a for a in self.coords), self.side)

    @property
    def index(self) -> int:
        return self.group.index(self.coords)


def _as_element(group_or_el, value, side):
    if isinstance(value, Element):
        return value
    if group_or_el is None:
        raise TypeError("raw coordinates need a group")
    return group_or_el.element(value, side)


def pairing(xi, x, group: Group | None = None) -> complex:
    """Value of the character ``xi`` at ``x``.

    Both arguments may be :class:`Element` instances (``xi`` on the dual side,
    ``x`` on the group side) or raw coordinates together with ``group``.
    """
    xi = _as_element(group, xi, DUAL)
    x = _as_element(group, x, GROUP)
    xi.group.check_same(x.group)
    if xi.side != DUAL or x.side != GROUP:
        raise GroupMismatchError("pairing expects (dual element, group element)")
    g = x.group
    lcm = math.lcm(*g.moduli)
    num = sum(a * b * (lcm // m) for a, b, m in zip(xi.coords, x.coords, g.moduli)) % lcm
    return complex(np.exp(2j * np.pi * num / lcm))


def group_metric(x: Element) -> int:
    """l1 sum of circular distances to the identity."""
    return int(sum(min(c, m - c) for c, m in zip(x.coords, x.group.moduli)))


# ---------------------------------------------------------------------------
# phase space


@dataclass(frozen=True)
class PhasePoint:
    """A point (x, xi) of G x G^."""

    pos: Element
    freq: Element

    def __post_init__(self):
        self.pos.group.check_same(self.freq.group)
        if self.pos.side != GROUP or self.freq.side != DUAL:
            raise GroupMismatchError("PhasePoint is (group element, dual element)")

    @classmethod
    def of(cls, group: Group, x, xi) -> "PhasePoint":
        return cls(group.element(x, GROUP), group.element(xi, DUAL))

    @property
    def group(self) -> Group:
        return self.pos.group

    def __add__(self, other):
        return PhasePoint(self.pos + other.pos, self.freq + other.freq)

    def __sub__(self, other):
        return PhasePoint(self.pos - other.pos, self.freq - other.freq)

    def __neg__(self):
        return PhasePoint(-self.pos, -self.freq)

    @property
    def index(self) -> int:
        return self.pos.index * self.group.order + self.freq.index


@dataclass(frozen=True)
class DualPhasePoint:
    """A point (omega, u) of G^ x G."""

    freq: Element
    pos: Element

    def __post_init__(self):
        self.pos.group.check_same(self.freq.group)
        if self.pos.side != GROUP or self.freq.side != DUAL:
            raise GroupMismatchError("DualPhasePoint is (dual element, group element)")

    @classmethod
    def of(cls, group: Group, omega, u) -> "DualPhasePoint":
        return cls(group.element(omega, DUAL), group.element(u, GROUP))

    @property
    def group(self) -> Group:
        return self.pos.group

    def __add__(self, other):
        return DualPhasePoint(self.freq + other.freq, self.pos + other.pos)

    def __sub__(self, other):
        return DualPhasePoint(self.freq - other.freq, self.pos - other.pos)

    @property
    def index(self) -> int:
        return self.freq.index * self.group.order + self.pos.index


def J(p: PhasePoint) -> DualPhasePoint:
    """J(x, xi) = (-xi, x)."""
    return DualPhasePoint(Element(p.group, (-p.freq).coords, DUAL),
                          Element(p.group, p.pos.coords, GROUP))


def J_inv(w: DualPhasePoint) -> PhasePoint:
    """J^{-1}(omega, u) = (u, -omega)."""
    return PhasePoint(Element(w.group, w.pos.coords, GROUP),
                      Element(w.group, (-w.freq).coords, DUAL))


def j_index_map(group: Group) -> np.ndarray:
    """jmap[flat (x, xi)] = flat index of J(x, xi) in G^ x G."""
    n = group.order
    x = np.repeat(np.arange(n), n)
    xi = np.tile(np.arange(n), n)
    return group.neg[xi] * n + x


def j_inv_index_map(group: Group) -> np.ndarray:
    """jinv[flat (omega, u)] = flat index of J^{-1}(omega, u) in G x G^."""
    n = group.order
    omega = np.repeat(np.arange(n), n)
    u = np.tile(np.arange(n), n)
    return u * n + group.neg[omega]


# ---------------------------------------------------------------------------
# subgroups and lattices


@dataclass(frozen=True)
class Subgroup:
    """The subgroup a_1 Z_{N_1} x ... x a_d Z_{N_d} of ``group``."""

    group: Group
    steps: tuple[int, ...]
    side: str = GROUP

    def __post_init__(self):
        steps = tuple(int(a) for a in self.steps)
        if len(steps) != self.group.rank:
            raise GroupMismatchError(f"{len(steps)} steps for a rank-{self.group.rank} group")
        for a, m in zip(steps, self.group.moduli):
            if a < 1 or m % a:
                raise ValueError(f"step {a} does not divide modulus {m}")
        object.__setattr__(self, "steps", steps)

    @property
    def order(self) -> int:
        return math.prod(m // a for a, m in zip(self.steps, self.group.moduli))

    @cached_property
    def quotient_moduli(self) -> tuple[int, ...]:
        """Moduli of the abstract group the subgroup is isomorphic to."""
        return tuple(m // a for a, m in zip(self.steps, self.group.moduli))

    @cached_property
    def index_group(self) -> Group:
        return Group(self.quotient_moduli)

    @cached_property
    def indices(self) -> np.ndarray:
        """Indices (in ``group``) of the subgroup elements, in its own enumeration order."""
        k = self.index_group.coords
        return self.group.index(k * np.asarray(self.steps))

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.group.order, dtype=bool)
        m[self.indices] = True
        return m

    def contains(self, index: int) -> bool:
        return bool(self.mask[index])


def annihilator(K: Subgroup) -> Subgroup:
    """K^perp = {xi : <xi, k> = 1 for all k in K}, a subgroup of the dual."""
    if K.side != GROUP:
        raise GroupMismatchError("annihilator expects a subgroup of G")
    steps = tuple(m // a for a, m in zip(K.steps, K.group.moduli))
    return Subgroup(K.group, steps, DUAL)


@dataclass(frozen=True)
class Lattice:
    """Lambda = a Z x b Z inside G x G^, with steps ``pos_steps`` and ``freq_steps``."""

    group: Group
    pos_steps: tuple[int, ...]
    freq_steps: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "pos_steps", tuple(int(a) for a in self.pos_steps))
        object.__setattr__(self, "freq_steps", tuple(int(b) for b in self.freq_steps))
        # validates divisibility
        _ = self.subgroup

    @classmethod
    def full(cls, group: Group) -> "Lattice":
        ones = (1,) * group.rank
        return cls(group, ones, ones)

    @cached_property
    def phase_group(self) -> Group:
        return self.group.phase_space()

    @cached_property
    def subgroup(self) -> Subgroup:
        return Subgroup(self.phase_group, self.pos_steps + self.freq_steps)

    @property
    def steps(self) -> tuple[int, ...]:
        return self.pos_steps + self.freq_steps

    @property
    def size(self) -> int:
        return self.subgroup.order

    @property
    def redundancy(self) -> float:
        return self.size / self.group.order

    @property
    def index_group(self) -> Group:
        """Lambda as an abstract group; its enumeration indexes coefficient arrays."""
        return self.subgroup.index_group

    @cached_property
    def points(self) -> np.ndarray:
        """Flat phase-space indices of the lattice points."""
        return self.subgroup.indices

    @cached_property
    def pos_freq(self) -> tuple[np.ndarray, np.ndarray]:
        """(position index, frequency index) in G for each lattice point."""
        n = self.group.order
        return self.points // n, self.points % n

    @cached_property
    def fundamental_domain(self) -> np.ndarray:
        """Flat phase-space indices of U = prod [0, a_j)."""
        box = Group(self.steps)
        return self.phase_group.index(box.coords)

    def decompose(self, index: int) -> tuple[int, int]:
        """Unique (lattice position, U position) with point = lambda + u."""
        c = self.phase_group.coords[index]
        steps = np.asarray(self.steps)
        u = c % steps
        k = c // steps
        return int(self.index_group.index(k)), int(Group(self.steps).index(u))

    def __repr__(self):
        return f"Lattice({self.group!r}, pos={self.pos_steps}, freq={self.freq_steps})"


# ---------------------------------------------------------------------------
# weights

SUBMULTIPLICATIVE = "submultiplicative"
MODERATE = "moderate"


@dataclass(frozen=True, eq=False)
class Weight:
    """A positive function on a finite group.

    ``kind`` is either ``"submultiplicative"`` or ``"moderate"``; a moderate
    weight records the submultiplicative ``base`` it is moderate against and
    the declared constant.
    """

    group: Group
    values: np.ndarray
    kind: str = SUBMULTIPLICATIVE
    base: "Weight | None" = None
    constant: float = 1.0
    label: str = field(default="")

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if vals.size != self.group.order:
            raise GroupMismatchError("weight length does not match group order")
        if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
            raise ValueError("weights must be positive and finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.kind not in (SUBMULTIPLICATIVE, MODERATE):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == MODERATE and self.base is None:
            raise ValueError("a moderate weight needs a base weight")

    def __call__(self, index) -> float:
        return self.values[index]

    # -- invariant checks ----------------------------------------------
    def is_normalized(self, tol=1e-12) -> bool:
        return abs(self.values[0] - 1.0) <= tol

    def is_even(self, tol=1e-12) -> bool:
        return bool(np.allclose(self.values, self.values[self.group.neg], rtol=tol, atol=0))

    def submultiplicativity_defect(self) -> float:
        """max over pairs of v(j+k) / (v(j) v(k)); <= 1 iff submultiplicative."""
        v = self.values
        return float(np.max(v[self.group.add_table] / np.outer(v, v)))

    def is_submultiplicative(self, tol=1e-12) -> bool:
        return self.submultiplicativity_defect() <= 1.0 + tol

    def moderateness_constant(self, v: "Weight | None" = None) -> float:
        """Smallest C with m(j + k) <= C v(k) m(j) for all j, k."""
        v = v if v is not None else self.base
        if v is None:
            raise ValueError("no base weight to be moderate against")
        self.group.check_same(v.group)
        m = self.values
        ratio = m[self.group.add_table] / (m[:, None] * v.values[None, :])
        return float(ratio.max())

    def is_moderate(self, v: "Weight | None" = None, tol=1e-12) -> bool:
        return self.moderateness_constant(v) <= self.constant * (1 + tol)

    def grs_profile(self) -> np.ndarray:
        """For every x, v(n x)^(1/n) at n = order of x (the orbit closes there)."""
        out = np.empty(self.group.order)
        c = self.group.coords
        mod = np.asarray(self.group.moduli)
        for i, n in enumerate(self.group.element_orders):
            out[i] = self.values[self.group.index((n * c[i]) % mod)] ** (1.0 / n)
        return out

    def grs_holds(self, tol=1e-12) -> bool:
        return bool(np.all(np.abs(self.grs_profile() - 1.0) <= tol))

    def max_root_along_orbits(self) -> float:
        """max over x and 1 <= n <= |G| of v(n x)^(1/n)."""
        c = self.group.coords
        mod = np.asarray(self.group.moduli)
        best = 0.0
        for n in range(1, self.group.order + 1):
            vals = self.values[self.group.index((n * c) % mod)]
            best = max(best, float(np.max(vals ** (1.0 / n))))
        return best

    def check(self) -> dict:
        """Evaluate all invariants; returns a dict of booleans."""
        out = {
            "normalized": self.is_normalized(),
            "even": self.is_even(),
            "grs": self.grs_holds(),
        }
        if self.kind == SUBMULTIPLICATIVE:
            out["submultiplicative"] = self.is_submultiplicative()
        else:
            out["moderate"] = self.is_moderate()
        return out


def polynomial_weight(group: Group, s: float, kind: str = SUBMULTIPLICATIVE) -> Weight:
    """v(k) = (1 + d(k))^s."""
    if kind == SUBMULTIPLICATIVE and s < 0:
        raise ValueError("negative exponent cannot give a submultiplicative weight")
    vals = (1.0 + group.metric) ** s
    if kind == MODERATE:
        base = polynomial_weight(group, abs(s))
        return Weight(group, vals, MODERATE, base=base, constant=1.0, label=f"poly(s={s})")
    return Weight(group, vals, SUBMULTIPLICATIVE, label=f"poly(s={s})")


def subexponential_weight(group: Group, a: float, b: float, s: float = 0.0,
                          kind: str = SUBMULTIPLICATIVE) -> Weight:
    """v(k) = exp(a d(k)^b) (1 + d(k))^s."""
    d = group.metric.astype(np.float64)
    vals = np.exp(a * d ** b) * (1.0 + d) ** s
    label = f"subexp(a={a},b={b},s={s})"
    if kind == SUBMULTIPLICATIVE:
        if a < 0 or s < 0 or not 0 <= b <= 1:
            raise ValueError("submultiplicative needs a, s >= 0 and 0 <= b <= 1")
        return Weight(group, vals, SUBMULTIPLICATIVE, label=label)
    base = subexponential_weight(group, abs(a), b, abs(s))
    return Weight(group, vals, MODERATE, base=base, constant=1.0, label=label)


def constant_weight(group: Group) -> Weight:
    return Weight(group, np.ones(group.order), label="1")


def tensor_weight(first: Weight, second: Weight) -> Weight:
    """(v1 (x) v2)(x, y) = v1(x) v2(y) on the product group.

    The result is submultiplicative when both factors are.
    """
    g = Group(first.group.moduli + second.group.moduli)
    vals = np.outer(first.values, second.values).reshape(-1)
    if first.kind == SUBMULTIPLICATIVE and second.kind == SUBMULTIPLICATIVE:
        return Weight(g, vals, label=f"{first.label}(x){second.label}")
    base = tensor_weight(first.base or first, second.base or second)
    return Weight(g, vals, MODERATE, base=base, constant=first.constant * second.constant,
                  label=f"{first.label}(x){second.label}")


def phase_weight_on_dual(v: Weight, group: Group) -> np.ndarray:
    """Array w[omega, u] = v(J^{-1}(omega, u)) for a weight v on G x G^."""
    v.group.check_same(group.phase_space())
    n = group.order
    return v.values[j_inv_index_map(group)].reshape(n, n)


def restrict_weight(v: Weight, lattice: Lattice) -> Weight:
    """Weight on the lattice index group, v(lambda) for lambda in Lambda."""
    v.group.check_same(lattice.phase_group)
    return Weight(lattice.index_group, v.values[lattice.points], v.kind,
                  base=None if v.base is None else restrict_weight(v.base, lattice),
                  constant=v.constant, label=v.label)
