"""Finite sums of Gaussian exponentials ``sum_k c_k exp(i W(h_k))``.

W is an isonormal process on R^d, so ``W`` is linear, ``exp(iW(h))``
multiply by adding frequencies, and ``E exp(iW(h)) = exp(-|h|^2 / 2)``.
Elements are kept in canonical form: frequencies within ``FREQ_TOL`` per
coordinate are merged, terms are sorted lexicographically by frequency and
zero coefficients are dropped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

FREQ_TOL = 1e-12
COEFF_TOL = 1e-14


class DimensionMismatch(ValueError):
    pass


def _canonical(coeffs: np.ndarray, freqs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m, d = freqs.shape
    if m == 0:
        return coeffs, freqs
    freqs = freqs + 0.0  # -0.0 -> 0.0
    if m > 1:
        # coordinate-wise gap clustering: split wherever consecutive sorted
        # values differ by more than FREQ_TOL, refining one coordinate at a time
        label = np.zeros(m, dtype=np.int64)
        for j in range(d):
            order = np.lexsort((freqs[:, j], label))
            lab, col = label[order], freqs[order, j]
            brk = np.empty(m, dtype=bool)
            brk[0] = True
            brk[1:] = (lab[1:] != lab[:-1]) | (np.diff(col) > FREQ_TOL)
            label[order] = np.cumsum(brk) - 1
        uniq, inv = np.unique(label, return_inverse=True)
        merged = np.zeros(len(uniq), dtype=complex)
        np.add.at(merged, inv, coeffs)
        order = np.lexsort(freqs.T[::-1]) if d else np.arange(m)
        _, first = np.unique(inv[order], return_index=True)
        reps = order[first]  # lexicographically smallest member of each cluster
        pos = np.lexsort(freqs[reps].T[::-1]) if d else np.arange(len(reps))
        freqs, coeffs = freqs[reps[pos]], merged[pos]
    keep = np.abs(coeffs) > COEFF_TOL
    return coeffs[keep], freqs[keep]


@dataclass(frozen=True, eq=False)
class GaussExp:
    dim: int
    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    freqs: np.ndarray | None = None

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        f = np.zeros((0, self.dim)) if self.freqs is None else np.array(self.freqs, dtype=float)
        f = f.reshape(len(c), self.dim)
        c, f = _canonical(c, f)
        c.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "freqs", f)

    @classmethod
    def const(cls, dim: int, c: complex = 1.0) -> "GaussExp":
        return cls(dim, [c], np.zeros((1, dim)))

    @classmethod
    def exp(cls, h, c: complex = 1.0) -> "GaussExp":
        """``c * exp(i W(h))``."""
        h = np.asarray(h, dtype=float).reshape(-1)
        return cls(len(h), [c], h[None, :])

    @classmethod
    def zero(cls, dim: int) -> "GaussExp":
        return cls(dim)

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator, max_terms: int = 5, scale: float = 1.0) -> "GaussExp":
        m = int(rng.integers(1, max_terms + 1))
        c = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        return cls(dim, c, scale * rng.standard_normal((m, dim)))

    @property
    def terms(self) -> list[tuple[complex, tuple[float, ...]]]:
        return [(complex(c), tuple(float(x) for x in h)) for c, h in zip(self.coeffs, self.freqs)]

    def __len__(self) -> int:
        return len(self.coeffs)

    def _check(self, other: "GaussExp"):
        if self.dim != other.dim:
            raise DimensionMismatch(f"dimension {self.dim} vs {other.dim}")

    def __add__(self, other: "GaussExp") -> "GaussExp":
        self._check(other)
        return GaussExp(self.dim, np.concatenate([self.coeffs, other.coeffs]),
                        np.concatenate([self.freqs, other.freqs]))

    def __neg__(self) -> "GaussExp":
        return GaussExp(self.dim, -self.coeffs, self.freqs)

    def __sub__(self, other: "GaussExp") -> "GaussExp":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, GaussExp):
            return gexp_mul(self, other)
        return GaussExp(self.dim, self.coeffs * other, self.freqs)

    def __rmul__(self, other):
        return GaussExp(self.dim, self.coeffs * other, self.freqs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GaussExp)
            and self.dim == other.dim
            and np.array_equal(self.coeffs, other.coeffs)
            and np.array_equal(self.freqs, other.freqs)
        )

    def __hash__(self):
        return hash((self.dim, self.coeffs.tobytes(), self.freqs.tobytes()))

    def adjoint(self) -> "GaussExp":
        return gexp_adjoint(self)

    def max_coeff(self) -> float:
        return float(np.max(np.abs(self.coeffs), initial=0.0))

    def distance(self, other: "GaussExp") -> float:
        """Largest coefficient of ``self - other`` in canonical form."""
        return (self - other).max_coeff()

    def allclose(self, other: "GaussExp", tol: float = 1e-10) -> bool:
        return self.distance(other) <= tol

    def same_terms(self, other: "GaussExp", freq_tol: float = FREQ_TOL, coeff_tol: float = COEFF_TOL) -> bool:
        """Frequency-level equality: identical term structure, frequencies
        equal within ``freq_tol`` per coordinate."""
        return (
            self.dim == other.dim
            and len(self) == len(other)
            and bool(np.all(np.abs(self.freqs - other.freqs) <= freq_tol))
            and bool(np.all(np.abs(self.coeffs - other.coeffs) <= coeff_tol))
        )

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [
                {"re": float(c.real), "im": float(c.imag), "freq": [float(x) for x in h]}
                for c, h in zip(self.coeffs, self.freqs)
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def gexp_mul(a: GaussExp, b: GaussExp) -> GaussExp:
    a._check(b)
    c = np.outer(a.coeffs, b.coeffs).reshape(-1)
    f = (a.freqs[:, None, :] + b.freqs[None, :, :]).reshape(len(c), a.dim)
    return GaussExp(a.dim, c, f)


def gexp_adjoint(a: GaussExp) -> GaussExp:
    return GaussExp(a.dim, np.conj(a.coeffs), -a.freqs)


def expectation(a: GaussExp) -> complex:
    return complex(np.sum(a.coeffs * np.exp(-0.5 * np.sum(a.freqs**2, axis=1))))


def second_quantization(u: np.ndarray, a: GaussExp, tol: float = 1e-10) -> GaussExp:
    """``exp(iW(h)) -> exp(iW(u h))`` for orthogonal ``u``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (a.dim, a.dim):
        raise DimensionMismatch(f"u has shape {u.shape}, expected {(a.dim, a.dim)}")
    if a.dim and np.max(np.abs(u.T @ u - np.eye(a.dim))) > tol:
        raise ValueError("second quantization requires an orthogonal matrix")
    return GaussExp(a.dim, a.coeffs, a.freqs @ u.T)


def l2_inner(a: GaussExp, b: GaussExp) -> complex:
    """``E(a^* b)``."""
    return expectation(gexp_mul(gexp_adjoint(a), b))


@dataclass(frozen=True)
class GaussianSampler:
    """``n`` draws of the standard Gaussian vector ``(gamma_1..gamma_d)``.

    Realizes ``W(h) = sum_i gamma_i h_i`` in the standard basis of R^d.
    """

    dim: int
    n: int
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("sample count must be >= 1")

    @cached_property
    def samples(self) -> np.ndarray:
        g = np.random.default_rng(self.seed).standard_normal((self.n, self.dim))
        g.setflags(write=False)
        return g


@dataclass
class MCEstimate:
    estimate: complex
    stderr: float


def mc_expectation(a: GaussExp, sampler: GaussianSampler) -> MCEstimate:
    if sampler.dim != a.dim:
        raise DimensionMismatch(f"sampler dim {sampler.dim} vs element dim {a.dim}")
    if len(a) == 0:
        return MCEstimate(0j, 0.0)
    vals = np.exp(1j * (sampler.samples @ a.freqs.T)) @ a.coeffs
    est = complex(vals.mean())
    if np.all(vals == vals[0]):
        return MCEstimate(complex(vals[0]), 0.0)
    err = float(np.std(vals, ddof=1) / np.sqrt(sampler.n)) if sampler.n > 1 else float("inf")
    return MCEstimate(est, err)
