"""Functions on a finite group: positive type, conditional negative type,
Fourier multipliers and the semigroup symbols ``exp(-t psi)``."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .groups import FiniteGroup, GroupAlgebraElement, cyclic, symmetric, symmetric_permutations

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10


class SymbolParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True, eq=False)
class SymbolFunction:
    group: FiniteGroup
    values: np.ndarray
    name: str = "symbol"

    def __post_init__(self):
        v = np.array(self.values, dtype=complex).reshape(-1)
        if v.shape != (self.group.order,):
            raise ValueError(f"expected {self.group.order} values, got {v.shape[0]}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __getitem__(self, s: int) -> complex:
        return complex(self.values[s])

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.values.imag) <= tol))

    @property
    def real(self) -> np.ndarray:
        return self.values.real.copy()

    def kernel_matrix(self) -> np.ndarray:
        """``P[s, r] = phi(s^{-1} r)``."""
        G = self.group
        return self.values[G.cayley[G.inverse[:, None], np.arange(G.order)[None, :]]]


@dataclass
class PositiveDefiniteResult:
    verdict: bool
    min_eigenvalue: float
    hermitian_residual: float
    witness: np.ndarray | None = None


@dataclass
class CondNegativeResult:
    verdict: bool
    max_constrained_value: float
    normalization_residual: float = 0.0
    symmetry_residual: float = 0.0
    witness: np.ndarray | None = None
    witness_value: float | None = None
    reason: str = ""


@dataclass
class SchoenbergReport:
    verdict: bool
    t_grid: list[float]
    min_eigenvalues: list[float]
    warnings: list[str] = field(default_factory=list)


def _scaled_tol(mat: np.ndarray, tol: float) -> float:
    return tol * max(1.0, float(np.linalg.norm(mat, 2)) if mat.size else 1.0)


def _sign_fix(v: np.ndarray) -> np.ndarray:
    k = np.flatnonzero(np.abs(v) > 1e-12 * np.abs(v).max(initial=1.0))
    return -v if len(k) and v[k[0]].real < 0 else v


def is_positive_definite(phi: SymbolFunction, tol: float = DEFAULT_TOL) -> PositiveDefiniteResult:
    """Gram test of positive type on the kernel ``[phi(s^{-1} r)]``.

    Tolerances are relative to the spectral norm of the kernel. On failure the
    witness is an eigenvector for the most negative eigenvalue (or ``None``
    when the kernel is not Hermitian).
    """
    P = phi.kernel_matrix()
    eff = _scaled_tol(P, tol)
    herm = float(np.max(np.abs(P - P.conj().T), initial=0.0))
    if herm > eff:
        return PositiveDefiniteResult(False, float("nan"), herm, None)
    w, v = np.linalg.eigh((P + P.conj().T) / 2)
    ok = bool(w[0] >= -eff)
    return PositiveDefiniteResult(ok, float(w[0]), herm, None if ok else _sign_fix(v[:, 0]))


def _sum_zero_basis(n: int) -> np.ndarray:
    """Orthonormal basis (columns) of ``{c : sum(c) = 0}`` in R^n."""
    if n <= 1:
        return np.zeros((n, 0))
    q, _ = np.linalg.qr(np.column_stack([np.ones(n), np.eye(n)[:, : n - 1]]))
    return q[:, 1:]


def is_cond_negative_type(psi: SymbolFunction, tol: float = DEFAULT_TOL) -> CondNegativeResult:
    """Exact certificate of conditional negative type.

    Checks ``psi(e) = 0`` and ``psi(s^{-1}) = psi(s)``, then the largest
    eigenvalue of ``[psi(s_i^{-1} s_j)]`` compressed to the sum-zero subspace.
    The witness ``c`` is scaled to max-abs entry 1 and ``witness_value`` is
    ``c^T K c`` at that scaling.
    """
    if not psi.is_real(tol):
        raise ValueError("conditional negative type requires a real-valued function")
    G = psi.group
    vals = psi.values.real
    K = psi.kernel_matrix().real
    eff = _scaled_tol(K, tol)
    norm_res = abs(float(vals[0]))
    sym_res = float(np.max(np.abs(vals - vals[G.inverse]), initial=0.0))
    if norm_res > eff:
        return CondNegativeResult(False, float("nan"), norm_res, sym_res, reason="psi(e) != 0")
    if sym_res > eff:
        return CondNegativeResult(False, float("nan"), norm_res, sym_res, reason="psi not symmetric")
    Q = _sum_zero_basis(G.order)
    if Q.shape[1] == 0:
        return CondNegativeResult(True, 0.0, norm_res, sym_res)
    Ks = (K + K.T) / 2
    w, v = np.linalg.eigh(Q.T @ Ks @ Q)
    top = float(w[-1])
    c = _sign_fix(Q @ v[:, -1])
    c = c / np.abs(c).max()
    ok = top <= eff
    return CondNegativeResult(
        ok, top, norm_res, sym_res,
        witness=c, witness_value=float(c @ Ks @ c),
        reason="" if ok else "positive quadratic form on sum-zero vectors",
    )


def semigroup_symbol(psi: SymbolFunction, t: float) -> SymbolFunction:
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if not psi.is_real(DEFAULT_TOL):
        raise ValueError("semigroup symbol requires real psi")
    return SymbolFunction(psi.group, np.exp(-t * psi.values.real), name=f"exp(-{t:g} {psi.name})")


def schoenberg_check(psi: SymbolFunction, t_grid, tol: float = DEFAULT_TOL) -> SchoenbergReport:
    """Sample positive type of ``exp(-t psi)`` over a finite grid of t.

    This only samples a necessary condition; ``is_cond_negative_type`` is the
    exact certificate.
    """
    t_grid = [float(t) for t in t_grid]
    warnings = []
    if not t_grid:
        msg = "empty t-grid: vacuous pass"
        log.warning(msg)
        warnings.append(msg)
    mins = []
    ok = True
    for t in t_grid:
        res = is_positive_definite(semigroup_symbol(psi, t), tol)
        mins.append(res.min_eigenvalue)
        ok &= res.verdict
    return SchoenbergReport(ok, t_grid, mins, warnings)


def multiplier_apply(phi: SymbolFunction, x: GroupAlgebraElement) -> GroupAlgebraElement:
    """``λ_s -> phi(s) λ_s``, extended linearly."""
    if phi.group != x.group:
        raise ValueError("group mismatch between symbol and element")
    return GroupAlgebraElement(x.group, phi.values * x.coeffs)


# builtin catalog

def psi_zero(G: FiniteGroup) -> SymbolFunction:
    return SymbolFunction(G, np.zeros(G.order), name="zero")


def psi_delta(G: FiniteGroup, c: float = 1.0) -> SymbolFunction:
    """``psi(e) = 0`` and ``psi(s) = c`` elsewhere."""
    v = np.full(G.order, float(c))
    v[0] = 0.0
    return SymbolFunction(G, v, name=f"delta({c:g})")


def psi_circle(n: int) -> SymbolFunction:
    """``4 sin^2(pi k / n)`` on Z_n, i.e. ``|e^{2 pi i k/n} - 1|^2``."""
    k = np.arange(n)
    return SymbolFunction(cyclic(n), 4 * np.sin(np.pi * k / n) ** 2, name=f"z{n}-circle")


def psi_word_length(n: int) -> SymbolFunction:
    """Word length ``min(k, n - k)`` on Z_n for the generators ``{1, -1}``."""
    k = np.arange(n)
    return SymbolFunction(cyclic(n), np.minimum(k, n - k).astype(float), name=f"z{n}-word")


def psi_displacement(n: int) -> SymbolFunction:
    """``n - #fix(sigma)`` on S_n, half the squared Frobenius distance of
    permutation matrices."""
    perms = symmetric_permutations(n)
    v = [n - sum(p[i] == i for i in range(n)) for p in perms]
    return SymbolFunction(symmetric(n), np.array(v, dtype=float), name=f"s{n}-displacement")


def builtin_psi(name: str) -> SymbolFunction:
    """Look up a builtin (group, psi) pair.

    Names: ``z2-delta``, ``z<n>-circle``, ``z<n>-word``, ``s<n>-displacement``
    (n <= 5), ``z<n>-zero``. Every catalog entry is certified conditionally
    negative before it is returned.
    """
    import re

    m = re.fullmatch(r"([zs])(\d+)-(delta|circle|word|zero|displacement)", name.strip())
    if not m:
        raise KeyError(f"unknown builtin psi {name!r}")
    fam, n, kind = m.group(1), int(m.group(2)), m.group(3)
    if fam == "z" and kind == "delta":
        psi = SymbolFunction(cyclic(n), psi_delta(cyclic(n)).values, name=name)
    elif fam == "z" and kind == "circle":
        psi = psi_circle(n)
    elif fam == "z" and kind == "word":
        psi = psi_word_length(n)
    elif fam == "z" and kind == "zero":
        psi = SymbolFunction(cyclic(n), np.zeros(n), name=name)
    elif fam == "s" and kind == "displacement":
        psi = psi_displacement(n)
    elif fam == "s" and kind == "zero":
        psi = SymbolFunction(symmetric(n), np.zeros(math.factorial(n)), name=name)
    else:
        raise KeyError(f"unknown builtin psi {name!r}")
    if not is_cond_negative_type(psi).verdict:
        raise KeyError(f"builtin {name!r} is not conditionally negative")
    return psi


BUILTIN_PSI_NAMES = ("z2-delta", "z3-circle", "z4-circle", "z8-circle", "s3-displacement")


def parse_symbol_text(text: str, G: FiniteGroup, name: str = "file") -> SymbolFunction:
    """Parse lines ``element_index value_re [value_im]``; unset elements are 0."""
    vals = np.zeros(G.order, dtype=complex)
    seen = set()
    for k, raw in enumerate(text.splitlines(), start=1):
        ln = raw.split("#")[0].strip()
        if not ln:
            continue
        parts = ln.split()
        if len(parts) not in (2, 3):
            raise SymbolParseError(f"expected 'index re [im]', got {ln!r}", k)
        try:
            s = int(parts[0])
            re_, im = float(parts[1]), float(parts[2]) if len(parts) == 3 else 0.0
        except ValueError:
            raise SymbolParseError(f"could not parse {ln!r}", k) from None
        if not 0 <= s < G.order:
            raise SymbolParseError(f"element {s} outside 0..{G.order - 1}", k)
        if s in seen:
            raise SymbolParseError(f"element {s} given twice", k)
        seen.add(s)
        vals[s] = complex(re_, im)
    return SymbolFunction(G, vals, name=name)


def load_symbol_file(path: str | Path, G: FiniteGroup) -> SymbolFunction:
    path = Path(path)
    return parse_symbol_text(path.read_text(), G, name=path.name)


def symbol_to_text(phi: SymbolFunction) -> str:
    return "".join(f"{s} {v.real:.17g} {v.imag:.17g}\n" for s, v in enumerate(phi.values))
