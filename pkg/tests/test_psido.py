import numpy as np
import pytest
from hypothesis import given, strategies as st

from finitepsido.group import Group, polynomial_weight
from finitepsido.identities import composition_residual, key_identity_residual
from finitepsido.psido import (OperatorMatrix, SpreadingFunction, Symbol, compose_symbols,
                               inverse_spreading, kn_apply, kn_bound_on_modulation_space,
                               kn_matrix, kn_rihaczek_pairing, kn_symbol_from_matrix,
                               modulation_norm, spreading, spreading_operator,
                               twisted_convolution)
from finitepsido.transforms import (Signal, modulation_matrix, tf_shift_matrix,
                                    translation_matrix)

seeds = st.integers(0, 2**32 - 1)


def test_identity_symbol(group, rng):
    I = Symbol.identity(group)
    f = Signal.random(group, rng)
    assert np.allclose(kn_apply(I, f).data, f.data)
    assert np.allclose(kn_matrix(I).data, np.eye(group.order))


def test_translation_and_modulation_symbols():
    G = Group((8,))
    rng = np.random.default_rng(0)
    f = Signal.random(G, rng)
    for a in range(8):
        T = Symbol.translation(G, a)
        assert np.allclose(kn_matrix(T).data, translation_matrix(G, a))
        assert np.allclose(kn_apply(T, f).data, np.roll(f.data, a))
        back = kn_symbol_from_matrix(OperatorMatrix(G, translation_matrix(G, a)))
        assert np.allclose(back.data, T.data)
        M = Symbol.modulation(G, a)
        assert np.allclose(kn_matrix(M).data, modulation_matrix(G, a))


def test_kn_apply_matches_matrix(group, rng):
    s = Symbol.random(group, rng)
    f = Signal.random(group, rng)
    assert np.allclose(kn_apply(s, f).data, kn_matrix(s).data @ f.data)


def test_kn_matrix_entry_formula():
    G = Group((6,))
    rng = np.random.default_rng(1)
    s = Symbol.random(G, rng)
    K = kn_matrix(s).data
    P = G.pairing_matrix
    for x in range(6):
        for y in range(6):
            ref = sum(s.data[x, xi] * P[xi, G.sub_table[x, y]] for xi in range(6)) / 6
            assert abs(K[x, y] - ref) < 1e-13


def test_symbol_matrix_roundtrip():
    G = Group((6,))
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(50):
        s = Symbol.random(G, rng)
        worst = max(worst, np.abs(kn_symbol_from_matrix(kn_matrix(s)).data - s.data).max())
    assert worst < 1e-10


def test_spreading_examples():
    G = Group((6,))
    sh = spreading(Symbol.identity(G)).data
    expect = np.zeros((6, 6))
    expect[0, 0] = 6
    assert np.allclose(sh, expect)
    a = 2
    sT = spreading(Symbol.translation(G, a)).data
    support = np.argwhere(np.abs(sT) > 1e-12)
    assert set(support[:, 1].tolist()) == {G.neg[a]}


def test_spreading_reconstruction(group, rng):
    s = Symbol.random(group, rng)
    assert np.allclose(spreading_operator(spreading(s)).data, kn_matrix(s).data, atol=1e-10)
    assert np.allclose(inverse_spreading(spreading(s)).data, s.data, atol=1e-12)


def test_twisted_identity_and_associativity():
    G = Group((2, 3))
    rng = np.random.default_rng(3)
    n = G.order
    F, H, K = (SpreadingFunction(G, rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
               for _ in range(3))
    d = SpreadingFunction.identity(G)
    assert np.allclose(twisted_convolution(F, d).data, F.data)
    assert np.allclose(twisted_convolution(d, F).data, F.data)
    lhs = twisted_convolution(twisted_convolution(F, H), K).data
    rhs = twisted_convolution(F, twisted_convolution(H, K)).data
    assert np.allclose(lhs, rhs)


def test_composition_of_shifts():
    G = Group((6,))
    for a in range(6):
        for b in range(6):
            c = compose_symbols(Symbol.translation(G, a), Symbol.translation(G, b))
            assert np.allclose(c.data, Symbol.translation(G, G.add_table[a, b]).data)
    x1, w1, x2, w2 = 1, 2, 3, 5
    c = compose_symbols(Symbol.tf_shift(G, x1, w1), Symbol.tf_shift(G, x2, w2))
    assert np.allclose(kn_matrix(c).data, tf_shift_matrix(G, x1, w1) @ tf_shift_matrix(G, x2, w2))


def test_compose_with_identity(group, rng):
    t = Symbol.random(group, rng)
    assert np.allclose(compose_symbols(Symbol.identity(group), t).data, t.data)


@given(seeds)
def test_composition_property(seed):
    rng = np.random.default_rng(seed)
    G = Group((6,))
    assert composition_residual(Symbol.random(G, rng), Symbol.random(G, rng)) < 1e-10


@given(seeds)
def test_kn_rihaczek_pairing(seed):
    rng = np.random.default_rng(seed)
    G = Group((6,))
    a, b = kn_rihaczek_pairing(Symbol.random(G, rng), Signal.random(G, rng), Signal.random(G, rng))
    assert abs(a - b) < 1e-10


def test_key_identity_z8_random_pairs():
    G = Group((8,))
    rng = np.random.default_rng(5)
    pairs = list(zip(rng.integers(0, 64, 200).tolist(), rng.integers(0, 64, 200).tolist()))
    r = key_identity_residual(Symbol.random(G, rng), Signal.random(G, rng),
                              Signal.random(G, rng), pairs)
    assert r < 1e-10


def test_modulation_norm_l2():
    G = Group((8,))
    rng = np.random.default_rng(0)
    g = Signal.random(G, rng)
    f = Signal.random(G, rng)
    # M^{2,2} with the phase-space measure is L^2 up to ||g||
    assert abs(modulation_norm(f, g, 2, 2) - f.norm() * g.norm()) < 1e-12


def test_bound_identity_ratio():
    G = Group((6,))
    g = Signal.random(G, np.random.default_rng(1))
    for p, q in [(1, 1), (2, 2), (np.inf, 1), (2, np.inf)]:
        out = kn_bound_on_modulation_space(Symbol.identity(G), g, p, q)
        assert abs(out["ratio"] - 1) < 1e-12


def test_bound_on_l2_equals_spectral_norm():
    G = Group((8,))
    rng = np.random.default_rng(2)
    g = Signal.random(G, rng)
    s = Symbol.random(G, rng)
    out = kn_bound_on_modulation_space(s, g, 2, 2)
    assert abs(out["ratio"] - np.linalg.norm(kn_matrix(s).data, 2)) < 1e-8
    assert out["sjostrand_norm"] > 0 and np.isfinite(out["constant"])


def test_bound_shift_with_weight():
    G = Group((8,))
    g = Signal.random(G, np.random.default_rng(3))
    m = polynomial_weight(G.phase_space(), 1)
    s = Symbol.tf_shift(G, 3, 1)
    out = kn_bound_on_modulation_space(s, g, 2, 2, m)
    assert np.isfinite(out["ratio"]) and out["ratio"] <= out["constant"] * out["sjostrand_norm"] + 1e-12


def test_bound_errors():
    G = Group((4,))
    with pytest.raises(ValueError):
        kn_bound_on_modulation_space(Symbol.identity(G), Signal(G, np.zeros(4)), 2, 2)


def test_operator_matrix_shape():
    with pytest.raises(ValueError):
        OperatorMatrix(Group((4,)), np.eye(3))
