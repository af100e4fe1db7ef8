"""Sectorial calculus for the generator ``A λ_s = psi(s) λ_s``.

For ``f`` in H^inf_0 of a sector, ``f(A)`` is the Cauchy integral

    f(A) = 1/(2 pi i) \\int_{\\partial \\Sigma_nu} f(z) (z - A)^{-1} dz

over the boundary of a smaller sector, traversed with the spectrum on the
left. A is diagonal in ``{λ_s}``, so ``f(A)`` is the multiplier
``s -> f(psi(s))``; :func:`hinfty_apply_direct` evaluates that directly and
serves as the oracle for the contour route. The kernel ``psi(s) = 0`` is sent
to 0 for every f in H^inf_0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .groups import GroupAlgebraElement, lp_norm
from .symbols import SymbolFunction


class PoleError(ValueError):
    def __init__(self, z: complex, s: int):
        self.z, self.s = z, s
        super().__init__(f"z = {z} lies in the spectrum (psi({s}) = {z.real:g})")


class QuadratureError(RuntimeError):
    def __init__(self, estimate: complex, refined: complex, tol: float):
        self.estimate, self.refined = estimate, refined
        super().__init__(f"contour quadrature not converged: {estimate} vs {refined} (tol {tol:g})")


@dataclass(frozen=True)
class GeneratorData:
    psi: SymbolFunction

    def __post_init__(self):
        v = self.psi.values
        if np.any(np.abs(v.imag) > 0) or np.any(v.real < 0):
            raise ValueError("generator needs a nonnegative real psi")
        if abs(v[0]) > 0:
            raise ValueError("psi(e) must be 0")

    @property
    def group(self):
        return self.psi.group

    @property
    def values(self) -> np.ndarray:
        return self.psi.values.real

    @property
    def spectrum(self) -> np.ndarray:
        return np.unique(self.values)


@dataclass(frozen=True)
class SectorFunction:
    """Analytic f on ``Sigma_theta`` with ``|f(z)| <= c |z|^s / (1+|z|)^{2s}``."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    s: float
    c: float
    theta: float = math.pi

    def __call__(self, z):
        return self.fn(np.asarray(z, dtype=complex))

    def check_analytic(self, points, h: float = 1e-6, tol: float = 1e-5) -> float:
        """Max Cauchy-Riemann defect ``|f'_x - f'_y / i|`` (relative) at the points.

        The difference step is ``h |z|`` so points near the origin are probed
        at their own scale."""
        z = np.asarray(points, dtype=complex)
        hz = h * np.maximum(np.abs(z), 1e-300)
        dx = (self(z + hz) - self(z - hz)) / (2 * hz)
        dy = (self(z + 1j * hz) - self(z - 1j * hz)) / (2j * hz)
        return float(np.max(np.abs(dx - dy) / np.maximum(np.abs(dx), 1e-300)))

    def decay_bound_holds(self, points) -> bool:
        z = np.asarray(points, dtype=complex)
        r = np.abs(z)
        bound = self.c * r**self.s / (1 + r) ** (2 * self.s)
        return bool(np.all(np.abs(self(z)) <= bound * (1 + 1e-12)))

    def sup_norm(self, theta: float, r_grid=None) -> float:
        """Estimate of ``sup |f|`` on ``Sigma_theta`` from its boundary rays."""
        if r_grid is None:
            r_grid = np.logspace(-8, 8, 4001)
        z = np.concatenate([r_grid * np.exp(1j * theta), r_grid * np.exp(-1j * theta), r_grid])
        return float(np.max(np.abs(self(z))))


def rational_bump(a: float, theta: float = 0.99 * math.pi) -> SectorFunction:
    """``z^a / (1+z)^{2a}``; on ``Sigma_theta`` the constant is ``cos(theta/2)^{-2a}``."""

    def fn(z):
        return np.exp(a * np.log(z) - 2 * a * np.log1p(z))

    return SectorFunction(f"z^{a:g}/(1+z)^{2 * a:g}", fn, s=a, c=math.cos(theta / 2) ** (-2 * a), theta=theta)


def builtin_family(exponents=(0.5, 1.0, 2.0)) -> list[SectorFunction]:
    return [rational_bump(a) for a in exponents]


def regularized_exponential(t: float, eps: float) -> SectorFunction:
    """``exp(-t z) z / (z + eps)``: in H^inf_0 of sectors narrower than pi/2."""

    def fn(z):
        return np.exp(-t * z) * z / (z + eps)

    # |f| <= |z|/eps near 0 and decays exponentially at infinity
    return SectorFunction(f"exp(-{t:g}z)z/(z+{eps:g})", fn, s=1.0, c=max(1.0, 1.0 / eps) * 4.0, theta=math.pi / 2)


def product(f: SectorFunction, g: SectorFunction) -> SectorFunction:
    return SectorFunction(
        f"({f.name})*({g.name})", lambda z: f(z) * g(z), s=f.s + g.s, c=f.c * g.c, theta=min(f.theta, g.theta)
    )


def resolvent(gen: GeneratorData, z: complex) -> SymbolFunction:
    """The multiplier ``s -> (z - psi(s))^{-1}``."""
    v = gen.values
    hit = np.flatnonzero(v == z)
    if len(hit):
        raise PoleError(complex(z), int(hit[0]))
    return SymbolFunction(gen.group, 1.0 / (z - v), name=f"R({z})")


@dataclass
class SectorialityEstimate:
    estimate: float
    analytic_bound: float
    samples: int


def sectoriality_constant(gen: GeneratorData, theta: float, grid) -> SectorialityEstimate:
    """Lower estimate of ``K_theta = sup |λ| ||(λ - A)^{-1}||`` over grid points
    outside the closed sector of half-angle theta.

    The operator norm on L^2 of a diagonal multiplier is its max modulus.
    Since the spectrum lies in ``[0, inf)``, the exact constant is
    ``1/sin(theta)`` for theta < pi/2 and 1 otherwise.
    """
    if not 0 < theta < math.pi:
        raise ValueError("theta must lie in (0, pi)")
    lam = np.asarray(grid, dtype=complex).reshape(-1)
    inside = (lam == 0) | (np.abs(np.angle(lam)) <= theta)
    if np.any(inside):
        raise ValueError(f"grid point {lam[np.argmax(inside)]} lies in the closed sector of angle {theta:g}")
    v = gen.values
    vals = np.abs(lam)[:, None] / np.abs(lam[:, None] - v[None, :])
    bound = 1.0 / math.sin(theta) if theta < math.pi / 2 else 1.0
    return SectorialityEstimate(float(vals.max(initial=0.0)), bound, len(lam))


@dataclass
class QuadConfig:
    """Composite Gauss-Legendre rule in ``u = log r`` along both rays.

    The truncation window is ``[r_min, r_max] * scale`` with ``scale = max
    psi``; ``r_max`` is widened from the decay constants of f when its tail
    bound ``c r^{-s} / (pi s)`` would exceed ``tail_tol``.
    """

    r_min: float = 1e-8
    r_max: float = 1e8
    panels: int = 64
    nodes: int = 8
    tol: float = 1e-9
    tail_tol: float = 1e-10
    max_doublings: int = 8
    adaptive: bool = True


def _window(f: SectorFunction, scale: float, q: QuadConfig) -> tuple[float, float]:
    lo = math.log(q.r_min * scale)
    r_tail = (f.c / (math.pi * f.s * q.tail_tol)) ** (1.0 / f.s)
    hi = math.log(max(q.r_max, r_tail) * max(scale, 1.0))
    r_head = (q.tail_tol * math.pi * (f.s + 1) / f.c) ** (1.0 / (f.s + 1))
    lo = min(lo, math.log(min(r_head, 1.0) * scale))
    return lo, hi


def _contour_values(f: SectorFunction, x: np.ndarray, nu: float, lo: float, hi: float, panels: int, nodes: int) -> np.ndarray:
    gx, gw = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    u = (mid[:, None] + half[:, None] * gx[None, :]).reshape(-1)
    w = (half[:, None] * gw[None, :]).reshape(-1)
    r = np.exp(u)
    out = np.zeros(len(x), dtype=complex)
    for sign in (-1, 1):
        e = cmath.exp(1j * sign * nu)
        z = r * e
        fz = f(z)
        # outward along e^{-i nu}, inward along e^{+i nu}; dz = e r du
        orient = 1.0 if sign < 0 else -1.0
        out += orient * ((fz * e * r * w)[None, :] / (z[None, :] - x[:, None])).sum(axis=1)
    return out / (2j * math.pi)


def contour_eval(f: SectorFunction, x, nu: float, quad: QuadConfig | None = None, scale: float = 1.0):
    """Cauchy integral of f at the real points x > 0; returns (values, panels used)."""
    q = quad or QuadConfig()
    x = np.asarray(x, dtype=float).reshape(-1)
    lo, hi = _window(f, scale, q)
    panels = q.panels
    est = _contour_values(f, x, nu, lo, hi, panels, q.nodes)
    if not q.adaptive:
        return est, panels
    for _ in range(q.max_doublings):
        ref = _contour_values(f, x, nu, lo, hi, 2 * panels, q.nodes)
        panels *= 2
        gap = np.abs(ref - est)
        if np.max(gap, initial=0.0) <= q.tol:
            return ref, panels
        prev, est = est, ref
    worst = int(np.argmax(gap)) if len(x) else 0
    raise QuadratureError(complex(prev[worst]), complex(est[worst]), q.tol)


def hinfty_apply(f: SectorFunction, gen: GeneratorData, nu: float, quad: QuadConfig | None = None) -> SymbolFunction:
    """``f(A)`` as a multiplier, computed by contour quadrature on ``|arg z| = nu``."""
    if not 0 < nu < f.theta:
        raise ValueError(f"contour angle {nu:g} must lie in (0, {f.theta:g})")
    v = gen.values
    out = np.zeros(len(v), dtype=complex)
    pos = v > 0
    if np.any(pos):
        uniq, inv = np.unique(v[pos], return_inverse=True)
        vals, _ = contour_eval(f, uniq, nu, quad, scale=float(v.max()))
        out[pos] = vals[inv]
    return SymbolFunction(gen.group, out, name=f"{f.name}(A)")


def hinfty_apply_direct(f: SectorFunction, gen: GeneratorData) -> SymbolFunction:
    v = gen.values
    out = np.zeros(len(v), dtype=complex)
    pos = v > 0
    out[pos] = f(v[pos].astype(complex))
    return SymbolFunction(gen.group, out, name=f"{f.name}(A) direct")


@dataclass
class NormEstimate:
    p: float
    p2_exact: float
    lower_bound: float
    hinf_norm: float
    ratio: float
    theta: float
    amplification: dict[int, float] = field(default_factory=dict)


def _amplified_norm(mats: np.ndarray, n: int, p: float) -> float:
    """``(Tr_n/n ⊗ Tr_k)`` L^p norm of a matrix on l^2(G) ⊗ C^k."""
    sv = np.linalg.svd(mats, compute_uv=False)
    return float((np.sum(sv**p) / n) ** (1.0 / p))


def calculus_norm_estimate(
    f: SectorFunction,
    gen: GeneratorData,
    p: float,
    theta: float | None = None,
    method: str = "ascent",
    seed: int = 0,
    trials: int = 40,
    amplify=(1, 2),
) -> NormEstimate:
    """Norm of ``f(A)`` on L^p(VN(G)) and its matrix amplifications.

    ``p2_exact`` is the L^2 operator norm ``max_s |f(psi(s))|``. For the
    given p, ``lower_bound`` maximizes ``||f(A) x||_p / ||x||_p`` over random
    ``x = sum_s X_s ⊗ λ_s`` with ``k x k`` coefficients (k in ``amplify``),
    refined by a Nelder-Mead ascent when ``method == "ascent"``. Only a lower
    bound; exact L^p operator norms are not computed.
    """
    if not 1 < p < math.inf:
        raise ValueError("p must lie in (1, inf)")
    if method not in ("random", "ascent"):
        raise ValueError(f"unknown method {method!r}")
    G = gen.group
    n = G.order
    m = hinfty_apply_direct(f, gen).values
    p2 = float(np.max(np.abs(m)))
    if theta is None:
        theta = min(f.theta * 0.999, max(math.pi * abs(1 / p - 0.5), 1e-3) + 0.05)
    hinf = f.sup_norm(theta)
    rng = np.random.default_rng(seed)
    # permutation index: M[r, r'] = coefficient at r r'^{-1}
    idx = G.cayley[np.arange(n)[:, None], G.inverse[None, :]]

    def ratio(coeffs: np.ndarray, k: int) -> float:
        X = coeffs.reshape(n, k, k)
        big = np.transpose(X[idx], (0, 2, 1, 3)).reshape(n * k, n * k)
        Y = (m[:, None, None] * X)[idx]
        bigY = np.transpose(Y, (0, 2, 1, 3)).reshape(n * k, n * k)
        den = _amplified_norm(big, n, p)
        return _amplified_norm(bigY, n, p) / den if den > 0 else 0.0

    amp = {}
    for k in amplify:
        # λ_s ⊗ 1 attains |f(psi(s))| exactly in every L^p, so the bound never
        # drops below the L^2 value
        best = p2
        best_x = None
        for _ in range(trials):
            x = rng.standard_normal(n * k * k) + 1j * rng.standard_normal(n * k * k)
            val = ratio(x, k)
            if val > best:
                best, best_x = val, x
        if method == "ascent" and best_x is not None:
            def neg(v):
                return -ratio(v[: n * k * k] + 1j * v[n * k * k:], k)

            x0 = np.concatenate([best_x.real, best_x.imag])
            res = minimize(neg, x0, method="Nelder-Mead", options={"maxiter": 400 * len(x0), "xatol": 1e-10, "fatol": 1e-13})
            best = max(best, -float(res.fun))
        amp[k] = best
    lower = max(amp.values(), default=0.0)
    return NormEstimate(p, p2, lower, hinf, lower / hinf if hinf > 0 else 0.0, theta, amp)


def lp_multiplier_ratio(mult: np.ndarray, x: GroupAlgebraElement, p: float) -> float:
    """``||T x||_p / ||x||_p`` for the multiplier with symbol ``mult``."""
    y = GroupAlgebraElement(x.group, mult * x.coeffs)
    return lp_norm(y, p) / lp_norm(x, p)
