import math
import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from markovdil.cocycle import (
    Cocycle,
    extract_cocycle,
    gram_from_psi,
    procrustes,
    verify_cocycle_law,
    verify_norm_identity,
)
from markovdil.groups import cyclic, load_group
from markovdil.symbols import BUILTIN_PSI_NAMES, SymbolFunction, builtin_psi

Z2, Z3 = cyclic(2), cyclic(3)
PSI_Z3 = SymbolFunction(Z3, [4 * math.sin(math.pi * k / 3) ** 2 for k in range(3)])


def rotation(a):
    return np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])


def hand_z3_cocycle():
    b = [(math.cos(2 * math.pi * k / 3) - 1, math.sin(2 * math.pi * k / 3)) for k in range(3)]
    return Cocycle(Z3, np.array(b), np.array([rotation(2 * math.pi * k / 3) for k in range(3)]))


class TestGram:
    def test_z2(self):
        assert np.array_equal(gram_from_psi(SymbolFunction(Z2, [0, 1])), [[0, 0], [0, 1]])

    def test_zero(self):
        G = load_group("dihedral 3")
        assert not gram_from_psi(SymbolFunction(G, np.zeros(6))).any()

    def test_z3_block(self):
        K = gram_from_psi(PSI_Z3)
        np.testing.assert_allclose(K[1:, 1:], [[3, 1.5], [1.5, 3]], atol=1e-14)

    def test_refuses_uncertified(self):
        with pytest.raises(ValueError):
            gram_from_psi(SymbolFunction(Z2, [0, -1]))


class TestExtract:
    def test_z2(self):
        c = extract_cocycle(SymbolFunction(Z2, [0, 1]))
        assert c.dim == 1
        np.testing.assert_array_equal(c.b[:, 0], [0, 1])
        assert c.pi[1, 0, 0] == -1
        r = verify_cocycle_law(c)
        assert r.verdict and r.max_residual <= 1e-15

    def test_zero(self):
        G = load_group("symmetric 3")
        c = extract_cocycle(SymbolFunction(G, np.zeros(6)))
        assert c.dim == 0
        assert verify_cocycle_law(c).max_residual == 0
        assert verify_norm_identity(c, SymbolFunction(G, np.zeros(6))).max_residual == 0

    def test_z3_matches_hand_cocycle_up_to_rotation(self):
        c = extract_cocycle(PSI_Z3)
        hand = hand_z3_cocycle()
        assert verify_cocycle_law(hand).max_residual < 1e-15
        assert c.dim == 2
        _, res = procrustes(c, hand)
        assert res < 1e-12
        assert abs(np.sum(c.b[1] ** 2) - 3) < 1e-12

    def test_circle_dimensions(self):
        assert extract_cocycle(builtin_psi("z2-delta")).dim == 1
        for n in (3, 4, 5, 8):
            assert extract_cocycle(builtin_psi(f"z{n}-circle")).dim == 2

    @pytest.mark.parametrize("name", BUILTIN_PSI_NAMES + ("z5-word", "z6-word", "s4-displacement"))
    def test_builtin_suite(self, name):
        psi = builtin_psi(name)
        c = extract_cocycle(psi)
        law = verify_cocycle_law(c, 1e-10)
        assert law.verdict, law
        assert verify_norm_identity(c, psi, 1e-10).verdict

    def test_json_round_trip(self):
        c = extract_cocycle(builtin_psi("s3-displacement"))
        back = Cocycle.from_json(c.group, c.to_json())
        assert np.array_equal(back.b, c.b) and np.array_equal(back.pi, c.pi)


@given(st.sampled_from(["z4-circle", "z8-circle", "s3-displacement", "z5-word"]), st.integers(0, 2**32 - 1))
def test_basis_independence(name, seed):
    psi = builtin_psi(name)
    ref = extract_cocycle(psi)
    order = np.random.default_rng(seed).permutation(ref.dim)
    other = extract_cocycle(psi, _order=order)
    assert verify_cocycle_law(other).verdict
    _, res = procrustes(ref, other)
    assert res < 1e-10


@given(st.integers(0, 2**32 - 1))
def test_affine_action_and_distances(seed):
    # b(s) - b(r) has squared norm psi(r^{-1} s), and h -> pi_s h + b(s) is an action
    psi = builtin_psi("s3-displacement")
    c = extract_cocycle(psi)
    G = c.group
    h = np.random.default_rng(seed).standard_normal(c.dim)
    for s in range(G.order):
        for r in range(G.order):
            d = c.b[s] - c.b[r]
            assert np.sum(d**2) == pytest.approx(psi.values.real[G.mul(G.inv(r), s)], abs=1e-12)
            assert np.allclose(c.affine(s, c.affine(r, h)), c.affine(G.mul(s, r), h), atol=1e-12)


class TestFaults:
    def test_sign_flip_detected(self):
        c = extract_cocycle(builtin_psi("z3-circle"))
        bad = c.with_pi(1, -c.pi[1])
        r = verify_cocycle_law(bad)
        assert not r.verdict
        assert r.max_residual >= 1
        assert r.witness is not None

    def test_z2_sign_flip(self):
        c = extract_cocycle(SymbolFunction(Z2, [0, 1]))
        r = verify_cocycle_law(c.with_pi(1, -c.pi[1]))
        assert not r.verdict and r.cocycle_residual >= 1

    def test_wrong_psi_norm_identity(self):
        c = extract_cocycle(PSI_Z3)
        r = verify_norm_identity(c, SymbolFunction(Z3, [0, 2, 3]))
        assert not r.verdict and r.worst_element == 1


def test_runtime_budget():
    t0 = time.perf_counter()
    for name in BUILTIN_PSI_NAMES:
        psi = builtin_psi(name)
        c = extract_cocycle(psi)
        verify_cocycle_law(c)
        verify_norm_identity(c, psi)
    assert time.perf_counter() - t0 < 1.0
