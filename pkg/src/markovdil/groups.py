"""Finite groups, the left regular representation and the group algebra VN(G).

Elements of a group of order n are the indices ``0..n-1`` with the identity
always at index 0. Builtin constructors use the following orderings:

* ``cyclic n``: ``k`` is the residue ``k mod n``.
* ``dihedral n``: ``r^k s^j`` sits at index ``k + n*j`` (order ``2n``).
* ``symmetric n``: permutations of ``range(n)`` in lexicographic order of
  their one-line notation; composition is ``(ab)(x) = a(b(x))``.
* ``A x B``: the pair ``(a, b)`` sits at index ``a*|B| + b``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "GroupAxiomError",
    "CayleyParseError",
    "FiniteGroup",
    "GroupAlgebraElement",
    "load_group",
    "load_group_file",
    "parse_cayley_text",
    "cyclic",
    "dihedral",
    "symmetric",
    "direct_product",
    "left_regular",
    "plancherel_trace",
    "lp_norm",
    "matrix_to_csv",
]


class GroupAxiomError(ValueError):
    """A Cayley table violates a group axiom.

    ``axiom`` names the first violated axiom and ``witness`` holds the
    offending indices (a triple for associativity).
    """

    def __init__(self, axiom: str, witness: tuple, detail: str = ""):
        self.axiom = axiom
        self.witness = tuple(int(w) for w in witness)
        msg = f"{axiom} violated at {self.witness}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class CayleyParseError(ValueError):
    """Malformed group description or Cayley-table file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    cayley: np.ndarray
    name: str = "explicit"
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        table = _validate_table(np.asarray(self.cayley))
        object.__setattr__(self, "cayley", _frozen(table))
        inv = np.argmin(table, axis=1)  # identity is index 0
        object.__setattr__(self, "inverse", _frozen(inv))

    @property
    def order(self) -> int:
        return self.cayley.shape[0]

    @property
    def identity(self) -> int:
        return 0

    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, s: int, r: int) -> int:
        return int(self.cayley[s, r])

    def inv(self, s: int) -> int:
        return int(self.inverse[s])

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteGroup) and np.array_equal(self.cayley, other.cayley)

    def __hash__(self) -> int:
        return hash(self.cayley.tobytes())

    def to_text(self) -> str:
        lines = [f"order {self.order}"]
        lines += [" ".join(str(int(v)) for v in row) for row in self.cayley]
        return "\n".join(lines) + "\n"


def _validate_table(table: np.ndarray) -> np.ndarray:
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise CayleyParseError(f"Cayley table must be a nonempty square array, got shape {table.shape}")
    if not np.issubdtype(table.dtype, np.integer):
        raise CayleyParseError("Cayley table entries must be integers")
    n = table.shape[0]
    bad = np.argwhere((table < 0) | (table >= n))
    if len(bad):
        i, j = bad[0]
        raise GroupAxiomError("closure", (i, j), f"entry {table[i, j]} outside 0..{n - 1}")
    table = _put_identity_first(table)
    ar = np.arange(n)
    # identity at 0 after re-sorting; verify two-sided
    if not np.array_equal(table[0], ar) or not np.array_equal(table[:, 0], ar):
        col = np.flatnonzero(table[:, 0] != ar)
        raise GroupAxiomError("identity", (0, col[0] if len(col) else 0), "no two-sided identity")
    # (ab)c == a(bc) exhaustively
    lhs = table[table[:, :, None], ar[None, None, :]]
    rhs = table[ar[:, None, None], table[None, :, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        a, b, c = bad[0]
        raise GroupAxiomError(
            "associativity", (a, b, c),
            f"({a}*{b})*{c} = {lhs[a, b, c]} but {a}*({b}*{c}) = {rhs[a, b, c]}",
        )
    for s in range(n):
        right = np.flatnonzero(table[s] == 0)
        left = np.flatnonzero(table[:, s] == 0)
        if len(right) != 1 or len(left) != 1 or right[0] != left[0]:
            raise GroupAxiomError("inverse", (s,), "no two-sided inverse")
    for i in range(n):
        if len(np.unique(table[i])) != n:
            raise GroupAxiomError("latin-row", (i,))
        if len(np.unique(table[:, i])) != n:
            raise GroupAxiomError("latin-column", (i,))
    return table.astype(np.int64)


def _put_identity_first(table: np.ndarray) -> np.ndarray:
    n = table.shape[0]
    ar = np.arange(n)
    cands = [e for e in range(n) if np.array_equal(table[e], ar) and np.array_equal(table[:, e], ar)]
    if not cands or cands[0] == 0:
        return table
    e = cands[0]
    order = np.array([e] + [k for k in range(n) if k != e])
    relabel = np.empty(n, dtype=np.int64)
    relabel[order] = ar
    return relabel[table[np.ix_(order, order)]]


# builtin families

def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise CayleyParseError(f"cyclic group needs n >= 1, got {n}")
    ar = np.arange(n)
    return FiniteGroup((ar[:, None] + ar[None, :]) % n, name=f"cyclic {n}")


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order ``2n``, element ``r^k s^j`` at ``k + n*j``."""
    if n < 1:
        raise CayleyParseError(f"dihedral group needs n >= 1, got {n}")
    table = np.empty((2 * n, 2 * n), dtype=np.int64)
    for x in range(2 * n):
        a, i = x % n, x // n
        for y in range(2 * n):
            b, j = y % n, y // n
            k = (a + (-1) ** i * b) % n
            table[x, y] = k + n * ((i + j) % 2)
    return FiniteGroup(table, name=f"dihedral {n}")


def symmetric(n: int) -> FiniteGroup:
    if not 1 <= n <= 5:
        raise CayleyParseError(f"symmetric group supported for 1 <= n <= 5, got {n}")
    perms = list(itertools.permutations(range(n)))
    index = {p: k for k, p in enumerate(perms)}
    table = np.array([[index[tuple(a[b[x]] for x in range(n))] for b in perms] for a in perms])
    return FiniteGroup(table, name=f"symmetric {n}")


def symmetric_permutations(n: int) -> list[tuple[int, ...]]:
    """The permutations labelling ``symmetric(n)``, in index order."""
    return list(itertools.permutations(range(n)))


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    m = h.order
    table = g.cayley[:, None, :, None] * m + h.cayley[None, :, None, :]
    table = table.reshape(g.order * m, g.order * m)
    return FiniteGroup(table, name=f"{g.name} x {h.name}")


_FAMILY = re.compile(r"^\s*(cyclic|dihedral|symmetric)\s+(\d+)\s*$")


def load_group(spec: str) -> FiniteGroup:
    """Build a group from a family string or an inline Cayley table.

    Accepted forms: ``"cyclic n"``, ``"dihedral n"``, ``"symmetric n"``
    (``n <= 5``), products such as ``"cyclic 2 x cyclic 3"``, or the text
    of a Cayley-table file (starting with ``order n``).
    """
    if spec.lstrip().startswith("order"):
        return parse_cayley_text(spec)
    parts = [p for p in re.split(r"\s+x\s+", spec.strip()) if p]
    if not parts:
        raise CayleyParseError(f"empty group spec {spec!r}")
    groups = []
    for p in parts:
        m = _FAMILY.match(p)
        if not m:
            raise CayleyParseError(f"unknown group family {p!r}")
        ctor = {"cyclic": cyclic, "dihedral": dihedral, "symmetric": symmetric}[m.group(1)]
        groups.append(ctor(int(m.group(2))))
    out = groups[0]
    for g in groups[1:]:
        out = direct_product(out, g)
    return out


def parse_cayley_text(text: str, name: str = "explicit") -> FiniteGroup:
    lines = [(k + 1, ln.split("#")[0].strip()) for k, ln in enumerate(text.splitlines())]
    lines = [(k, ln) for k, ln in lines if ln]
    if not lines:
        raise CayleyParseError("empty Cayley-table file")
    k0, head = lines[0]
    m = re.fullmatch(r"order\s+(\d+)", head)
    if not m:
        raise CayleyParseError(f"expected 'order n', got {head!r}", k0)
    n = int(m.group(1))
    rows = lines[1:]
    if len(rows) != n:
        raise CayleyParseError(f"expected {n} table rows, found {len(rows)}", rows[-1][0] if rows else k0)
    table = []
    for k, ln in rows:
        try:
            row = [int(v) for v in ln.split()]
        except ValueError:
            raise CayleyParseError(f"non-integer entry in {ln!r}", k) from None
        if len(row) != n:
            raise CayleyParseError(f"expected {n} entries, found {len(row)}", k)
        table.append(row)
    return FiniteGroup(np.array(table, dtype=np.int64), name=name)


def load_group_file(path: str | Path) -> FiniteGroup:
    path = Path(path)
    return parse_cayley_text(path.read_text(), name=path.name)


def left_regular(G: FiniteGroup, s: int) -> np.ndarray:
    """Matrix of left translation: ``(λ_s)[r, r'] = 1`` iff ``r = s r'``."""
    if not 0 <= s < G.order:
        raise IndexError(f"element {s} out of range for group of order {G.order}")
    n = G.order
    mat = np.zeros((n, n), dtype=complex)
    mat[G.cayley[s], np.arange(n)] = 1.0
    return mat


@dataclass(frozen=True, eq=False)
class GroupAlgebraElement:
    """``sum_s coeffs[s] λ_s`` in VN(G)."""

    group: FiniteGroup
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.shape != (self.group.order,):
            raise ValueError(f"expected {self.group.order} coefficients, got {c.shape[0]}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def basis(cls, G: FiniteGroup, s: int) -> "GroupAlgebraElement":
        c = np.zeros(G.order, dtype=complex)
        c[s] = 1.0
        return cls(G, c)

    @classmethod
    def random(cls, G: FiniteGroup, rng: np.random.Generator) -> "GroupAlgebraElement":
        return cls(G, rng.standard_normal(G.order) + 1j * rng.standard_normal(G.order))

    def matrix(self) -> np.ndarray:
        G = self.group
        n = G.order
        # M[r, r'] = c_{r r'^{-1}}
        idx = G.cayley[np.arange(n)[:, None], G.inverse[None, :]]
        return self.coeffs[idx]

    def _check(self, other: "GroupAlgebraElement"):
        if self.group != other.group:
            raise ValueError("group mismatch")

    def __add__(self, other):
        self._check(other)
        return GroupAlgebraElement(self.group, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return GroupAlgebraElement(self.group, self.coeffs - other.coeffs)

    def __mul__(self, other):
        if isinstance(other, GroupAlgebraElement):
            self._check(other)
            G = self.group
            out = np.zeros(G.order, dtype=complex)
            np.add.at(out, G.cayley.reshape(-1), np.outer(self.coeffs, other.coeffs).reshape(-1))
            return GroupAlgebraElement(G, out)
        return GroupAlgebraElement(self.group, self.coeffs * other)

    def __rmul__(self, c):
        return GroupAlgebraElement(self.group, self.coeffs * c)

    def adjoint(self) -> "GroupAlgebraElement":
        return GroupAlgebraElement(self.group, np.conj(self.coeffs[self.group.inverse]))

    def allclose(self, other: "GroupAlgebraElement", tol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0) <= tol)


def plancherel_trace(x: GroupAlgebraElement) -> complex:
    """Normalized trace: the coefficient of the identity."""
    return complex(x.coeffs[0])


def lp_norm(x: GroupAlgebraElement, p: float) -> float:
    """Noncommutative L^p norm against the normalized trace ``Tr/|G|``."""
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    sv = np.linalg.svd(x.matrix(), compute_uv=False)
    if np.isinf(p):
        return float(sv.max(initial=0.0))
    return float((np.sum(sv**p) / x.group.order) ** (1.0 / p))


def matrix_to_csv(mat: np.ndarray) -> str:
    """One line per row, each entry written as a ``re,im`` pair."""
    lines = []
    for row in np.asarray(mat, dtype=complex):
        lines.append(",".join(f"{v.real:.17g},{v.imag:.17g}" for v in row))
    return "\n".join(lines) + "\n"
