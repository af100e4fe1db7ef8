import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from markovdil.gaussalg import (
    DimensionMismatch,
    GaussExp,
    GaussianSampler,
    expectation,
    gexp_adjoint,
    gexp_mul,
    l2_inner,
    mc_expectation,
    second_quantization,
)

seeds = st.integers(0, 2**32 - 1)


def rand_orthogonal(d, rng):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def as_dict(a: GaussExp):
    return {tuple(round(x, 12) for x in h): c for c, h in a.terms}


class TestAlgebra:
    def test_inverse_frequency(self):
        h = [0.3, -1.2]
        p = GaussExp.exp(h) * GaussExp.exp([-x for x in h])
        assert p == GaussExp.const(2)
        assert p.terms == [(1 + 0j, (0.0, 0.0))]

    def test_bilinear(self):
        p = gexp_mul(GaussExp.exp([1.0, 0], 2), GaussExp.exp([0, 1.0], 3))
        assert p.terms == [(6 + 0j, (1.0, 1.0))]

    def test_four_term_expansion(self):
        h, hp = np.array([1.0, 0.5]), np.array([-0.25, 2.0])
        a = GaussExp.exp(h) + GaussExp.exp(hp)
        got = as_dict(a * a.adjoint())
        d = h - hp
        want = {(0.0, 0.0): 2, tuple(np.round(d, 12)): 1, tuple(np.round(-d, 12)): 1}
        assert got.keys() == want.keys()
        for k in want:
            assert got[k] == pytest.approx(want[k], abs=1e-15)

    def test_adjoint(self):
        a = GaussExp.exp([0.7], 2 - 3j)
        assert a.adjoint().terms == [(2 + 3j, (-0.7,))]
        assert gexp_adjoint(a) == a.adjoint()
        assert GaussExp.const(3).adjoint() == GaussExp.const(3)
        assert expectation(a * a.adjoint()) == pytest.approx(13)
        assert expectation(GaussExp.exp([0.7, 2.0]) * GaussExp.exp([0.7, 2.0]).adjoint()) == pytest.approx(1, abs=1e-15)

    def test_canonical_merges_and_drops(self):
        a = GaussExp(1, [1, 2, -3], [[0.5], [0.5 + 1e-14], [0.5]])
        assert len(a) == 0
        b = GaussExp(2, [1, 1], [[0, 1], [0, 1]])
        assert b.terms == [(2 + 0j, (0.0, 1.0))]

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            GaussExp.exp([1.0]) * GaussExp.exp([1.0, 2.0])

    @given(seeds)
    def test_ring_axioms(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (GaussExp.random(2, rng, 4) for _ in range(3))
        assert ((a * b) * c).distance(a * (b * c)) < 1e-12
        assert (a * (b + c)).distance(a * b + a * c) < 1e-12
        assert (a * b).distance(b * a) < 1e-12  # commutative
        assert (a * b).adjoint().distance(b.adjoint() * a.adjoint()) < 1e-12
        assert a.adjoint().adjoint() == a

    @given(seeds)
    def test_expectation_is_positive_and_linear(self, seed):
        rng = np.random.default_rng(seed)
        a, b = GaussExp.random(3, rng), GaussExp.random(3, rng)
        assert expectation(a * a.adjoint()).real >= -1e-12
        assert abs(expectation(a * a.adjoint()).imag) < 1e-12
        assert expectation(a + 2 * b) == pytest.approx(expectation(a) + 2 * expectation(b))


class TestExpectation:
    def test_constant(self):
        assert expectation(GaussExp.const(1)) == 1
        assert expectation(GaussExp.const(2, 4)) == 4

    def test_unit_vector(self):
        assert expectation(GaussExp.exp([1.0, 0.0])) == pytest.approx(math.exp(-0.5), abs=1e-15)
        assert expectation(GaussExp.exp([1.0, 0.0])).real == pytest.approx(0.606531, abs=1e-6)

    def test_symmetric_difference(self):
        h = np.array([0.4, -0.2])
        assert expectation(GaussExp.exp(h) - GaussExp.exp(-h)) == 0

    def test_l2_inner(self):
        assert l2_inner(GaussExp.const(2), GaussExp.const(2)) == 1
        assert l2_inner(GaussExp.exp([0.3, 0.9]), GaussExp.exp([0.3, 0.9])) == pytest.approx(1)
        assert l2_inner(GaussExp.exp([1.0, 0]), GaussExp.exp([0, 1.0])) == pytest.approx(math.exp(-1), abs=1e-15)
        assert l2_inner(GaussExp.exp([1.0, 0]), GaussExp.exp([0, 1.0])).real == pytest.approx(0.367879, abs=1e-6)

    def test_quadrature_oracle(self):
        # 1-d Gauss-Hermite quadrature as an independent oracle for E e^{i t gamma}
        x, w = np.polynomial.hermite_e.hermegauss(80)
        for t in (0.3, 1.0, 2.5):
            oracle = np.sum(w * np.exp(1j * t * x)) / math.sqrt(2 * math.pi)
            assert expectation(GaussExp.exp([t])) == pytest.approx(oracle, abs=1e-12)


class TestSecondQuantization:
    def test_identity(self, rng):
        a = GaussExp.random(3, rng)
        assert second_quantization(np.eye(3), a) == a

    def test_rotation(self):
        u = np.array([[0.0, -1.0], [1.0, 0.0]])
        out = second_quantization(u, GaussExp.exp([1.0, 0.0]))
        assert out.terms == [(1 + 0j, (0.0, 1.0))]

    @given(seeds)
    def test_preserves_expectation_and_products(self, seed):
        rng = np.random.default_rng(seed)
        u = rand_orthogonal(3, rng)
        a, b = GaussExp.random(3, rng), GaussExp.random(3, rng)
        assert expectation(second_quantization(u, a)) == pytest.approx(expectation(a), abs=1e-12)
        lhs = second_quantization(u, a * b)
        rhs = second_quantization(u, a) * second_quantization(u, b)
        assert lhs.distance(rhs) < 1e-12

    def test_rejects_non_orthogonal(self):
        with pytest.raises(ValueError):
            second_quantization(2 * np.eye(2), GaussExp.const(2))


class TestMonteCarlo:
    def test_constant_exact(self):
        est = mc_expectation(GaussExp.const(2), GaussianSampler(2, 10, seed=1))
        assert est.estimate == 1 and est.stderr == 0

    def test_zero_frequency(self):
        est = mc_expectation(GaussExp.exp([0.0, 0.0]), GaussianSampler(2, 1000))
        assert est.estimate == 1 and est.stderr == 0

    def test_clt_envelope(self):
        est = mc_expectation(GaussExp.exp([1.0, 0.0]), GaussianSampler(2, 100_000, seed=7))
        assert abs(est.estimate - 0.606531) < 4 / math.sqrt(1e5)

    def test_deterministic(self):
        a = GaussExp.exp([0.5, 0.5], 1 + 1j)
        x = mc_expectation(a, GaussianSampler(2, 5000, seed=3))
        y = mc_expectation(a, GaussianSampler(2, 5000, seed=3))
        assert x == y

    def test_bad_sampler(self):
        with pytest.raises(ValueError):
            GaussianSampler(2, 0)
        with pytest.raises(DimensionMismatch):
            mc_expectation(GaussExp.const(2), GaussianSampler(3, 10))
