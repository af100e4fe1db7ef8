"""Desk-scale crossed product ``L^inf(Omega) x_alpha G``.

An element ``sum_s pi(f_s)(λ_s ⊗ 1)`` is stored as its integrand ``f``, one
:class:`GaussExp` per group element. The action is
``alpha_s = second_quantization(pi_s)`` for the orthogonal representation of a
:class:`Cocycle`.

Products use the alpha-twisted convolution
``(g * f)(t) = sum_s g_s alpha_s(f_{s^{-1} t})``, which is what the
commutation relation ``λ_s pi(x) λ_s^* = pi(alpha_s(x))`` forces. The block
matrix of :func:`block_matrix` (the operator on ``L^2(G, L^2(Omega))``) gives
an independent route to products and adjoints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cocycle import Cocycle
from .gaussalg import FREQ_TOL, GaussExp, expectation, gexp_adjoint, gexp_mul
from .groups import GroupAlgebraElement

CONVENTIONS = ("A", "B")


class StructureMismatch(ValueError):
    pass


def alpha(c: Cocycle, s: int, a: GaussExp) -> GaussExp:
    # pi_s is orthogonal by construction; skip the re-check of second_quantization
    return GaussExp(a.dim, a.coeffs, a.freqs @ c.pi[s].T)


@dataclass(frozen=True, eq=False)
class CrossedElement:
    cocycle: Cocycle
    integrand: tuple[GaussExp, ...]

    def __post_init__(self):
        integ = tuple(self.integrand)
        if len(integ) != self.group.order:
            raise StructureMismatch(f"integrand has {len(integ)} entries for a group of order {self.group.order}")
        for f in integ:
            if f.dim != self.cocycle.dim:
                raise StructureMismatch(f"integrand dim {f.dim} vs cocycle dim {self.cocycle.dim}")
        object.__setattr__(self, "integrand", integ)

    @property
    def group(self):
        return self.cocycle.group

    @property
    def dim(self) -> int:
        return self.cocycle.dim

    def __getitem__(self, s: int) -> GaussExp:
        return self.integrand[s]

    def _check(self, other: "CrossedElement"):
        if self.cocycle is not other.cocycle and not (
            self.group == other.group
            and np.array_equal(self.cocycle.b, other.cocycle.b)
            and np.array_equal(self.cocycle.pi, other.cocycle.pi)
        ):
            raise StructureMismatch("crossed elements built over different cocycles")

    def __mul__(self, other):
        if isinstance(other, CrossedElement):
            return crossed_mul(self, other)
        return CrossedElement(self.cocycle, tuple(f * other for f in self.integrand))

    def __add__(self, other: "CrossedElement") -> "CrossedElement":
        self._check(other)
        return CrossedElement(self.cocycle, tuple(a + b for a, b in zip(self.integrand, other.integrand)))

    def __sub__(self, other: "CrossedElement") -> "CrossedElement":
        self._check(other)
        return CrossedElement(self.cocycle, tuple(a - b for a, b in zip(self.integrand, other.integrand)))

    def adjoint(self) -> "CrossedElement":
        return crossed_adjoint(self)

    def distance(self, other: "CrossedElement") -> float:
        self._check(other)
        return max(a.distance(b) for a, b in zip(self.integrand, other.integrand))

    def frequency_equal(self, other: "CrossedElement", freq_tol: float = FREQ_TOL) -> bool:
        """Entrywise equality of canonical term lists (frequencies within ``freq_tol``)."""
        return all(a.same_terms(b, freq_tol) for a, b in zip(self.integrand, other.integrand))

    def to_json(self) -> dict:
        return {"order": self.group.order, "dim": self.dim, "integrand": [f.to_json() for f in self.integrand]}

    @classmethod
    def zero(cls, c: Cocycle) -> "CrossedElement":
        return cls(c, tuple(GaussExp.zero(c.dim) for _ in range(c.group.order)))

    @classmethod
    def random(cls, c: Cocycle, rng: np.random.Generator, max_terms: int = 3, density: float = 0.7) -> "CrossedElement":
        out = []
        for _ in range(c.group.order):
            if rng.random() < density:
                out.append(GaussExp.random(c.dim, rng, max_terms=max_terms))
            else:
                out.append(GaussExp.zero(c.dim))
        return cls(c, tuple(out))


def unit(c: Cocycle) -> CrossedElement:
    return embed_pi(GaussExp.const(c.dim), c)


def embed_J(x: GroupAlgebraElement, c: Cocycle) -> CrossedElement:
    """``sum_s x_s λ_s -> sum_s x_s (1 ⋊ λ_s)``."""
    if x.group != c.group:
        raise StructureMismatch("group mismatch")
    return CrossedElement(c, tuple(GaussExp.const(c.dim, v) for v in x.coeffs))


def embed_pi(a: GaussExp, c: Cocycle) -> CrossedElement:
    if a.dim != c.dim:
        raise StructureMismatch(f"element dim {a.dim} vs cocycle dim {c.dim}")
    out = [GaussExp.zero(c.dim) for _ in range(c.group.order)]
    out[0] = a
    return CrossedElement(c, tuple(out))


def crossed_mul(g: CrossedElement, f: CrossedElement) -> CrossedElement:
    g._check(f)
    G = g.group
    c = g.cocycle
    acc = [[] for _ in range(G.order)]
    for s in range(G.order):
        if len(g[s]) == 0:
            continue
        for r in range(G.order):
            fr = f[r]
            if len(fr) == 0:
                continue
            # r = s^{-1} t  <=>  t = s r
            acc[G.mul(s, r)].append(gexp_mul(g[s], alpha(c, s, fr)))
    return CrossedElement(c, tuple(_sum(terms, c.dim) for terms in acc))


def _sum(parts: list[GaussExp], dim: int) -> GaussExp:
    if not parts:
        return GaussExp.zero(dim)
    return GaussExp(dim, np.concatenate([p.coeffs for p in parts]), np.concatenate([p.freqs for p in parts]))


def crossed_adjoint(f: CrossedElement) -> CrossedElement:
    """``(f^*)_t = alpha_t(f_{t^{-1}})^*``."""
    G = f.group
    return CrossedElement(
        f.cocycle, tuple(gexp_adjoint(alpha(f.cocycle, t, f[G.inv(t)])) for t in range(G.order))
    )


def weight(f: CrossedElement) -> complex:
    """The Plancherel weight of f: ``E(f_e)``."""
    return expectation(f[0])


def weight_pair(f: CrossedElement, g: CrossedElement) -> complex:
    """``phi(f^* g) = sum_s E(f_s^* g_s)``."""
    f._check(g)
    return complex(sum(expectation(gexp_mul(gexp_adjoint(a), b)) for a, b in zip(f.integrand, g.integrand)))


def cond_expectation(f: CrossedElement) -> GroupAlgebraElement:
    return GroupAlgebraElement(f.group, [expectation(a) for a in f.integrand])


def modular_flow(f: CrossedElement, t: float) -> CrossedElement:
    """Modular automorphism group of the weight. Finite groups are unimodular
    and alpha preserves the trace, so the flow is the identity."""
    return f


def ut_frequency_scale(t: float, convention: str) -> float:
    """Multiplier of ``b(s)`` in the phase ``exp(iW(scale * b(s)))`` of U_t.

    ``A``: ``sqrt(2) t`` (group law in t). ``B``: ``sqrt(2 t)``, t >= 0.
    """
    if convention == "A":
        return float(np.sqrt(2.0) * t)
    if convention == "B":
        if t < 0:
            raise ValueError("convention B is defined for t >= 0 only")
        return float(np.sqrt(2.0 * t))
    raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def apply_Ut(f: CrossedElement, t: float, convention: str = "A") -> CrossedElement:
    """``f_s -> exp(iW(scale * b(s))) f_s`` with scale from :func:`ut_frequency_scale`."""
    k = ut_frequency_scale(t, convention)
    if k == 0.0:
        return f
    b = f.cocycle.b
    return CrossedElement(
        f.cocycle,
        tuple(GaussExp(a.dim, a.coeffs, a.freqs + k * b[s]) for s, a in enumerate(f.integrand)),
    )


def block_matrix(f: CrossedElement) -> list[list[GaussExp]]:
    """Operator blocks on ``L^2(G, L^2(Omega))``: ``[r][r'] = alpha_{r^{-1}}(f_{r r'^{-1}})``."""
    G = f.group
    n = G.order
    return [[alpha(f.cocycle, G.inv(r), f[G.mul(r, G.inv(rp))]) for rp in range(n)] for r in range(n)]


def block_mul(A: list[list[GaussExp]], B: list[list[GaussExp]]) -> list[list[GaussExp]]:
    n = len(A)
    dim = A[0][0].dim
    return [[_sum([gexp_mul(A[r][k], B[k][c]) for k in range(n)], dim) for c in range(n)] for r in range(n)]


def block_adjoint(A: list[list[GaussExp]]) -> list[list[GaussExp]]:
    n = len(A)
    return [[gexp_adjoint(A[c][r]) for c in range(n)] for r in range(n)]


def block_distance(A: list[list[GaussExp]], B: list[list[GaussExp]]) -> float:
    return max(a.distance(b) for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def commutator_residual(c: Cocycle, s: int, a: GaussExp) -> tuple[bool, float]:
    """``J(λ_s) pi(a) J(λ_s)^*`` against ``pi(alpha_s(a))``: (exact equality, distance)."""
    G = c.group
    Js = embed_J(GroupAlgebraElement.basis(G, s), c)
    lhs = crossed_mul(crossed_mul(Js, embed_pi(a, c)), crossed_adjoint(Js))
    rhs = embed_pi(alpha(c, s, a), c)
    return lhs.frequency_equal(rhs), lhs.distance(rhs)
