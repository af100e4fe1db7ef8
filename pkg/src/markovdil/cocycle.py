"""Cocycle extraction from a conditionally negative function.

Given psi, the kernel ``K(s, r) = (psi(s) + psi(r) - psi(s^{-1} r)) / 2`` is
PSD; factoring it gives vectors ``b(s)`` with ``<b(s), b(r)> = K(s, r)``, and
the orthogonal representation is recovered from ``pi_s b(r) = b(sr) - b(s)``.
The affine action ``beta_s(h) = pi_s h + b(s)`` is available through
:meth:`Cocycle.affine`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .groups import FiniteGroup
from .symbols import SymbolFunction, is_cond_negative_type


class CocycleConstructionError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Cocycle:
    group: FiniteGroup
    b: np.ndarray   # (|G|, d)
    pi: np.ndarray  # (|G|, d, d)
    residual: float = 0.0

    def __post_init__(self):
        b = np.array(self.b, dtype=float).reshape(self.group.order, -1)
        d = b.shape[1]
        pi = np.array(self.pi, dtype=float).reshape(self.group.order, d, d)
        for a in (b, pi):
            a.setflags(write=False)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "pi", pi)

    @property
    def dim(self) -> int:
        return self.b.shape[1]

    def affine(self, s: int, h: np.ndarray) -> np.ndarray:
        return self.pi[s] @ h + self.b[s]

    def with_pi(self, s: int, mat: np.ndarray) -> "Cocycle":
        """Copy with ``pi_s`` replaced (used for fault injection)."""
        pi = self.pi.copy()
        pi[s] = mat
        return Cocycle(self.group, self.b, pi, self.residual)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "basis_dependent": True,
            "b": self.b.tolist(),
            "pi": self.pi.tolist(),
            "construction_residual": self.residual,
        }

    @classmethod
    def from_json(cls, G: FiniteGroup, data: dict | str) -> "Cocycle":
        if isinstance(data, str):
            data = json.loads(data)
        d = int(data["dim"])
        b = np.array(data["b"], dtype=float).reshape(G.order, d)
        pi = np.array(data["pi"], dtype=float).reshape(G.order, d, d)
        return cls(G, b, pi, float(data.get("construction_residual", 0.0)))


def gram_from_psi(psi: SymbolFunction, tol: float = 1e-10) -> np.ndarray:
    cert = is_cond_negative_type(psi, tol)
    if not cert.verdict:
        raise ValueError(f"psi is not certified conditionally negative: {cert.reason}")
    v = psi.values.real
    return 0.5 * (v[:, None] + v[None, :] - psi.kernel_matrix().real)


def extract_cocycle(psi: SymbolFunction, rank_tol: float = 1e-10, *, _order=None) -> Cocycle:
    """Realize psi as ``||b(s)||^2`` for a 1-cocycle b of an orthogonal rep.

    ``_order`` permutes the eigenpairs before truncation; only the basis of the
    result changes.
    """
    G = psi.group
    K = gram_from_psi(psi)
    n = G.order
    w, v = np.linalg.eigh(K)
    top = w.max(initial=0.0)
    keep = np.flatnonzero(w > rank_tol * top) if top > 0 else np.array([], dtype=int)
    keep = keep[::-1]  # descending eigenvalues
    if _order is not None:
        keep = keep[np.asarray(_order)]
    vecs = v[:, keep]
    # deterministic signs: largest-magnitude entry positive
    for j in range(vecs.shape[1]):
        k = np.argmax(np.abs(vecs[:, j]))
        if vecs[k, j] < 0:
            vecs[:, j] = -vecs[:, j]
    B = vecs * np.sqrt(w[keep])[None, :]
    d = B.shape[1]
    pi = np.zeros((n, d, d))
    worst = 0.0
    for s in range(n):
        target = B[G.cayley[s]] - B[s]  # row r: b(sr) - b(s)
        if d == 0:
            continue
        X, *_ = np.linalg.lstsq(B, target, rcond=None)  # B X = target, X = pi_s^T
        u, _ = scipy.linalg.polar(X.T)
        pi[s] = u
        worst = max(worst, float(np.max(np.abs(B @ u.T - target))))
    if worst > 1e-8:
        raise CocycleConstructionError(
            f"least-squares residual {worst:.3e} exceeds 1e-8; psi mis-certified or rank_tol too aggressive"
        )
    return Cocycle(G, B, pi, worst)


@dataclass
class CocycleLawReport:
    verdict: bool
    cocycle_residual: float
    homomorphism_residual: float
    orthogonality_residual: float
    witness: tuple[int, int] | None = None

    @property
    def max_residual(self) -> float:
        return max(self.cocycle_residual, self.homomorphism_residual, self.orthogonality_residual)


def verify_cocycle_law(c: Cocycle, tol: float = 1e-10) -> CocycleLawReport:
    """Exhaustive check of ``b(sr) = b(s) + pi_s b(r)`` and ``pi_{sr} = pi_s pi_r``."""
    G = c.group
    n, d = G.order, c.dim
    if d == 0:
        return CocycleLawReport(True, 0.0, 0.0, 0.0)
    # cocycle[s, r] = b(sr) - b(s) - pi_s b(r)
    coc = c.b[G.cayley] - c.b[:, None, :] - np.einsum("sij,rj->sri", c.pi, c.b)
    coc_err = np.max(np.abs(coc), axis=2)
    hom = c.pi[G.cayley] - np.einsum("sij,rjk->srik", c.pi, c.pi)
    hom_err = np.max(np.abs(hom), axis=(2, 3))
    orth = np.einsum("sji,sjk->sik", c.pi, c.pi) - np.eye(d)[None]
    orth_res = float(np.max(np.abs(orth)))
    total = np.maximum(coc_err, hom_err)
    worst = np.unravel_index(np.argmax(total), total.shape)
    ok = max(total.max(), orth_res) <= tol
    return CocycleLawReport(
        bool(ok), float(coc_err.max()), float(hom_err.max()), orth_res,
        None if ok else (int(worst[0]), int(worst[1])),
    )


@dataclass
class NormIdentityReport:
    verdict: bool
    max_residual: float
    worst_element: int


def verify_norm_identity(c: Cocycle, psi: SymbolFunction, tol: float = 1e-10) -> NormIdentityReport:
    res = np.abs(np.sum(c.b**2, axis=1) - psi.values.real)
    k = int(np.argmax(res))
    return NormIdentityReport(bool(res[k] <= tol), float(res[k]), k)


def procrustes(c1: Cocycle, c2: Cocycle) -> tuple[np.ndarray, float]:
    """Orthogonal Q minimizing ``||B1 Q - B2||`` and the max residual of both
    ``b2 = Q^T b1`` and ``pi2 = Q^T pi1 Q``."""
    if c1.dim != c2.dim:
        raise ValueError("cocycle dimensions differ")
    if c1.dim == 0:
        return np.zeros((0, 0)), 0.0
    u, _, vt = np.linalg.svd(c1.b.T @ c2.b)
    Q = u @ vt
    rb = np.max(np.abs(c1.b @ Q - c2.b))
    rp = np.max(np.abs(np.einsum("ji,sjk,kl->sil", Q, c1.pi, Q) - c2.pi))
    return Q, float(max(rb, rp))
