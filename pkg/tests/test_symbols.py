import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from markovdil.groups import GroupAlgebraElement, cyclic, dihedral, load_group, symmetric
from markovdil.symbols import (
    BUILTIN_PSI_NAMES,
    SymbolFunction,
    SymbolParseError,
    builtin_psi,
    is_cond_negative_type,
    is_positive_definite,
    multiplier_apply,
    parse_symbol_text,
    schoenberg_check,
    semigroup_symbol,
    symbol_to_text,
)

Z2 = cyclic(2)


def sym(G, vals):
    return SymbolFunction(G, np.asarray(vals, dtype=complex))


def affine_psi(G, rng, d=3):
    """psi(s) = ||rho(s) v - v||^2 for the regular representation tensored
    with a random vector: conditionally negative by construction."""
    n = G.order
    V = rng.standard_normal((n, d))
    vals = np.empty(n)
    for s in range(n):
        moved = V[G.cayley[s]]  # (λ_s ⊗ 1) v, permuting rows
        vals[s] = np.sum((moved - V) ** 2)
    return sym(G, vals)


class TestPositiveDefinite:
    def test_constant_one(self):
        r = is_positive_definite(sym(Z2, [1, 1]))
        assert r.verdict and r.min_eigenvalue == pytest.approx(0, abs=1e-14)

    def test_negative(self):
        r = is_positive_definite(sym(Z2, [1, -2]))
        assert not r.verdict
        assert r.min_eigenvalue == pytest.approx(-1, abs=1e-14)
        w = r.witness
        P = np.array([[1, -2], [-2, 1]])
        assert (w.conj() @ P @ w).real < 0

    def test_exponential(self):
        r = is_positive_definite(sym(Z2, [1, math.exp(-1)]))
        assert r.verdict and r.min_eigenvalue == pytest.approx(1 - math.exp(-1), abs=1e-14)
        assert r.min_eigenvalue == pytest.approx(0.632121, abs=1e-6)

    def test_non_hermitian_kernel(self):
        # phi(s^{-1}) must be conj(phi(s)); on Z_3 an imaginary part at s=1 alone breaks it
        r = is_positive_definite(sym(cyclic(3), [1, 0.1j, 0]))
        assert not r.verdict and r.hermitian_residual > 0


class TestCondNegative:
    def test_z2_positive_case(self):
        r = is_cond_negative_type(sym(Z2, [0, 1]))
        assert r.verdict
        c = r.witness
        assert np.allclose(np.abs(c), [1, 1]) and c.sum() == pytest.approx(0)
        assert r.witness_value == pytest.approx(-2, abs=1e-14)

    def test_z2_negative_case(self):
        r = is_cond_negative_type(sym(Z2, [0, -1]))
        assert not r.verdict
        assert np.allclose(r.witness, [1, -1])
        assert r.witness_value == pytest.approx(2, abs=1e-14)

    @pytest.mark.parametrize("spec", ["cyclic 1", "cyclic 2", "dihedral 3", "symmetric 3"])
    def test_zero(self, spec):
        G = load_group(spec)
        assert is_cond_negative_type(sym(G, np.zeros(G.order))).verdict

    def test_normalization_and_symmetry_reasons(self):
        r = is_cond_negative_type(sym(Z2, [1, 1]))
        assert not r.verdict and "psi(e)" in r.reason
        r = is_cond_negative_type(sym(cyclic(3), [0, 1, 2]))
        assert not r.verdict and "symmetric" in r.reason

    def test_complex_rejected(self):
        with pytest.raises(ValueError):
            is_cond_negative_type(sym(Z2, [0, 1j]))

    @given(st.sampled_from(["cyclic 3", "cyclic 6", "dihedral 4", "symmetric 3"]), st.integers(0, 2**32 - 1))
    def test_affine_construction_is_certified(self, spec, seed):
        G = load_group(spec)
        psi = affine_psi(G, np.random.default_rng(seed))
        assert is_cond_negative_type(psi, 1e-9).verdict
        # Schoenberg: exp(-t psi) positive definite at every sampled t
        assert schoenberg_check(psi, [0.05, 0.5, 3.0], 1e-9).verdict

    @given(st.sampled_from(["cyclic 4", "dihedral 3", "symmetric 3"]), st.integers(0, 2**32 - 1))
    def test_witness_is_a_real_violation(self, spec, seed):
        G = load_group(spec)
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(G.order)
        v = v + v[G.inverse]
        v[0] = 0.0
        psi = sym(G, v)
        r = is_cond_negative_type(psi)
        K = psi.kernel_matrix().real
        # brute-force oracle: the top eigenvalue of the compressed form
        Q = np.linalg.qr(np.column_stack([np.ones(G.order), np.eye(G.order)[:, :-1]]))[0][:, 1:]
        top = np.linalg.eigvalsh(Q.T @ K @ Q).max()
        assert r.verdict == (top <= 1e-10 * max(1, np.linalg.norm(K, 2)))
        if not r.verdict:
            c = r.witness
            assert abs(c.sum()) < 1e-12
            assert c @ K @ c > 0
            assert c @ K @ c == pytest.approx(r.witness_value)


class TestSchoenberg:
    def test_z2_pass(self):
        r = schoenberg_check(sym(Z2, [0, 1]), [0.1, 1, 10])
        assert r.verdict
        np.testing.assert_allclose(r.min_eigenvalues, [1 - math.exp(-t) for t in (0.1, 1, 10)], atol=1e-14)

    def test_z2_fail(self):
        r = schoenberg_check(sym(Z2, [0, -1]), [1])
        assert not r.verdict
        assert r.min_eigenvalues[0] == pytest.approx(1 - math.e, abs=1e-12)
        assert r.min_eigenvalues[0] == pytest.approx(-1.718282, abs=1e-6)

    def test_empty_grid_vacuous(self, caplog):
        r = schoenberg_check(sym(Z2, [0, -1]), [])
        assert r.verdict and r.warnings
        assert any("vacuous" in rec.message for rec in caplog.records)


class TestMultipliers:
    def test_identity_multiplier(self, rng):
        G = dihedral(3)
        x = GroupAlgebraElement.random(G, rng)
        assert multiplier_apply(sym(G, np.ones(6)), x).allclose(x, 0)

    def test_z2_half(self):
        y = multiplier_apply(sym(Z2, [1, 0.5]), GroupAlgebraElement(Z2, [1, 1]))
        assert np.array_equal(y.coeffs, [1, 0.5])

    def test_t_zero_is_identity(self, rng):
        psi = builtin_psi("s3-displacement")
        x = GroupAlgebraElement.random(psi.group, rng)
        phi = semigroup_symbol(psi, 0)
        assert np.array_equal(phi.values, np.ones(6))
        assert multiplier_apply(phi, x).allclose(x, 0)

    def test_semigroup_values(self):
        np.testing.assert_allclose(semigroup_symbol(sym(Z2, [0, 1]), 1).values, [1, math.exp(-1)], atol=1e-15)
        assert semigroup_symbol(sym(Z2, [0, 1]), 1).values[1] == pytest.approx(0.367879, abs=1e-6)
        psi3 = sym(cyclic(3), [4 * math.sin(math.pi * k / 3) ** 2 for k in range(3)])
        np.testing.assert_allclose(psi3.values.real, [0, 3, 3], atol=1e-14)
        np.testing.assert_allclose(semigroup_symbol(psi3, 0.5).values, [1, math.exp(-1.5), math.exp(-1.5)], atol=1e-14)

    def test_negative_t(self):
        with pytest.raises(ValueError):
            semigroup_symbol(sym(Z2, [0, 1]), -0.1)


class TestCatalogAndFiles:
    @pytest.mark.parametrize("name", BUILTIN_PSI_NAMES + ("z5-word", "z4-zero", "s4-displacement"))
    def test_builtins_certified(self, name):
        psi = builtin_psi(name)
        assert is_cond_negative_type(psi).verdict

    def test_circle_values(self):
        for n in (3, 4, 8):
            psi = builtin_psi(f"z{n}-circle")
            expected = [abs(np.exp(2j * math.pi * k / n) - 1) ** 2 for k in range(n)]
            np.testing.assert_allclose(psi.values.real, expected, atol=1e-14)

    def test_displacement_counts_moved_points(self):
        psi = builtin_psi("s3-displacement")
        assert psi.group == symmetric(3)
        assert sorted(psi.values.real.tolist()) == [0, 2, 2, 2, 3, 3]

    def test_unknown(self):
        with pytest.raises(KeyError):
            builtin_psi("z3-bogus")

    def test_round_trip(self):
        psi = builtin_psi("z8-circle")
        back = parse_symbol_text(symbol_to_text(psi), psi.group)
        assert np.array_equal(back.values, psi.values)

    @pytest.mark.parametrize(
        "text,line",
        [("0 0\n1 abc\n", 2), ("0 0\n\n5 1\n", 3), ("0 0 0 0\n", 1), ("0 0\n0 1\n", 2)],
    )
    def test_parse_errors(self, text, line):
        with pytest.raises(SymbolParseError) as ei:
            parse_symbol_text(text, cyclic(3))
        assert ei.value.line == line
