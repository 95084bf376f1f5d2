"""Truncated full Fock space over a uniform time grid.

The one-particle space is ``D ⊗ L2([0, T_max])`` restricted to step functions
on ``m`` equal cells, with orthonormal basis ``e_c ⊗ f_δ`` where ``e_c`` is the
normalised indicator of cell ``c``.  Tensor words of length at most ``N`` are
indexed in mixed radix with the first tensor leg as the most significant digit.

Creation and annihilation with grid-aligned amplitudes act exactly on this
subspace; the only approximation is dropping components of degree ``N + 1``.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ..scalars import exact


class OffGridError(ValueError):
    """An interval endpoint is not a grid point."""


class SupportOverflowError(ValueError):
    """A time shift would move an operator's support outside ``[0, T_max]``."""


@dataclass(frozen=True)
class GridSpec:
    T_max: Fraction
    m: int
    d_space: int = 1
    N: int = 3

    def __post_init__(self):
        object.__setattr__(self, "T_max", Fraction(self.T_max))
        if self.m < 1 or self.d_space < 1 or self.N < 0 or self.T_max <= 0:
            raise ValueError("grid needs positive T_max, m, d_space and N >= 0")

    @property
    def width(self) -> Fraction:
        return self.T_max / self.m

    @property
    def alphabet(self) -> int:
        return self.m * self.d_space

    @cached_property
    def offsets(self) -> list[int]:
        out, acc = [], 0
        for k in range(self.N + 2):
            out.append(acc)
            acc += self.alphabet**k
        return out

    @property
    def dim(self) -> int:
        return self.offsets[self.N + 1]

    def cell(self, t) -> int:
        """Grid index of a time point, raising if it is not a grid point."""
        q = Fraction(t) / self.width
        if q.denominator != 1 or not 0 <= q <= self.m:
            raise OffGridError(f"time {t} is not a grid point of {self}")
        return int(q)

    def cells(self, r, s) -> range:
        a, b = self.cell(r), self.cell(s)
        if b < a:
            raise ValueError(f"empty interval [{r}, {s}]")
        return range(a, b)

    def index(self, word: Sequence[tuple[int, int]]) -> int:
        """Basis index of a word of ``(cell, D-index)`` letters."""
        k = len(word)
        if k > self.N:
            raise ValueError("word longer than the truncation degree")
        idx = 0
        for c, delta in word:
            idx = idx * self.alphabet + c * self.d_space + delta
        return self.offsets[k] + idx

    def word(self, index: int) -> tuple:
        k = max(j for j in range(self.N + 1) if self.offsets[j] <= index)
        rest = index - self.offsets[k]
        letters = []
        for _ in range(k):
            rest, code = divmod(rest, self.alphabet)
            letters.append(divmod(code, self.d_space))
        return tuple(reversed(letters))

    @cached_property
    def degree_of_index(self) -> np.ndarray:
        deg = np.zeros(self.dim, dtype=np.int64)
        for k in range(self.N + 1):
            deg[self.offsets[k] : self.offsets[k + 1]] = k
        return deg

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def __str__(self) -> str:
        return f"GridSpec(T_max={self.T_max}, m={self.m}, d_space={self.d_space}, N={self.N})"


@dataclass(frozen=True)
class Amplitude:
    """A step function with D-vector values: tuple of ``(r, s, vector)`` pieces."""

    pieces: tuple
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        norm = []
        for r, s, vec in self.pieces:
            r, s = Fraction(r), Fraction(s)
            if s <= r:
                raise ValueError("amplitude pieces need r < s")
            norm.append((r, s, tuple(exact(v) if not isinstance(v, (float, complex)) else v for v in vec)))
        object.__setattr__(self, "pieces", tuple(norm))
        object.__setattr__(self, "_hash", hash(self.pieces))

    def __hash__(self) -> int:
        # amplitudes key the exact engine's state dicts; rational hashing is slow
        return self._hash

    @classmethod
    def indicator(cls, r, s, vec) -> Amplitude:
        return cls(((r, s, tuple(vec)),))

    @property
    def dim(self) -> int:
        return len(self.pieces[0][2]) if self.pieces else 0

    def is_zero(self) -> bool:
        return all(not any(v) for _, _, v in self.pieces)

    def support(self):
        live = [(r, s) for r, s, v in self.pieces if any(v)]
        if not live:
            return None
        return min(r for r, _ in live), max(s for _, s in live)

    def inner(self, other: Amplitude):
        """``⟨self, other⟩``, conjugate-linear in ``self``."""
        total = exact(0)
        for r1, s1, v1 in self.pieces:
            for r2, s2, v2 in other.pieces:
                ov = min(s1, s2) - max(r1, r2)
                if ov > 0:
                    acc = exact(0)
                    for a, b in zip(v1, v2):
                        acc = acc + a.conjugate() * b
                    total = total + acc * ov
        return total

    def shifted(self, r) -> Amplitude:
        r = Fraction(r)
        return Amplitude(tuple((a + r, b + r, v) for a, b, v in self.pieces))

    def restricted(self, a, b) -> Amplitude:
        a, b = Fraction(a), Fraction(b)
        out = []
        for r, s, v in self.pieces:
            lo, hi = max(r, a), min(s, b)
            if hi > lo:
                out.append((lo, hi, v))
        return Amplitude(tuple(out))

    def mapped(self, T) -> Amplitude:
        """Apply the matrix ``T`` on D pointwise."""
        out = []
        for r, s, v in self.pieces:
            w = tuple(sum((T[i][j] * v[j] for j in range(len(v))), exact(0)) for i in range(len(T)))
            out.append((r, s, w))
        return Amplitude(tuple(out))

    def cell_coefficients(self, g: GridSpec) -> dict:
        """Coordinates ``(cell, δ) -> coefficient`` in the normalised cell basis."""
        root = math.sqrt(float(g.width))
        out: dict = {}
        for r, s, v in self.pieces:
            if len(v) != g.d_space:
                raise ValueError(f"amplitude has D-dimension {len(v)}, grid expects {g.d_space}")
            for c in g.cells(r, s):
                for delta, val in enumerate(v):
                    if val:
                        out[(c, delta)] = out.get((c, delta), 0) + root * complex(val)
        return out


@dataclass(frozen=True, eq=False)
class FockOp:
    """A sparse operator on the truncated space, with bookkeeping.

    ``raises`` is the largest number of degrees the operator can add;
    ``support`` is the time hull of all amplitudes used to build it (None for
    multiples of the identity).
    """

    grid: GridSpec
    matrix: sp.csr_matrix
    raises: int = 0
    support: tuple | None = None
    blocks: int = 1

    @property
    def shape(self):
        return self.matrix.shape

    def __add__(self, other):
        if isinstance(other, FockOp):
            return FockOp(
                self.grid,
                (self.matrix + other.matrix).tocsr(),
                max(self.raises, other.raises),
                _hull(self.support, other.support),
                self.blocks,
            )
        return self + identity(self.grid, self.blocks) * other

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * other

    def __rsub__(self, other):
        return (-1) * self + other

    def __mul__(self, c):
        if isinstance(c, FockOp):
            return self @ c
        return FockOp(self.grid, (self.matrix * complex(c)).tocsr(), self.raises, self.support, self.blocks)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __matmul__(self, other):
        if isinstance(other, FockOp):
            return FockOp(
                self.grid,
                (self.matrix @ other.matrix).tocsr(),
                self.raises + other.raises,
                _hull(self.support, other.support),
                self.blocks,
            )
        return self.matrix @ other

    @property
    def H(self) -> FockOp:
        return FockOp(self.grid, self.matrix.conj().T.tocsr(), self.raises, self.support, self.blocks)

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def apply_adjoint(self, v: np.ndarray) -> np.ndarray:
        return self.matrix.conj().T @ v

    def entry(self, k: int, l: int) -> FockOp:
        """The ``(k, l)`` block (1-based) of an operator matrix."""
        n = self.grid.dim
        block = self.matrix[(k - 1) * n : k * n, (l - 1) * n : l * n].tocsr()
        return FockOp(self.grid, block, self.raises, self.support, 1)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _hull(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return (min(a[0], b[0]), max(a[1], b[1]))


def identity(g: GridSpec, blocks: int = 1) -> FockOp:
    return FockOp(g, sp.identity(g.dim * blocks, dtype=complex, format="csr"), 0, None, blocks)


def zero_op(g: GridSpec, blocks: int = 1) -> FockOp:
    n = g.dim * blocks
    return FockOp(g, sp.csr_matrix((n, n), dtype=complex), 0, None, blocks)


def creation(g: GridSpec, amp: Amplitude) -> FockOp:
    """``A*(amp)``: prepend ``amp``; components pushed past degree N are dropped."""
    coeffs = amp.cell_coefficients(g)
    rows, cols, vals = [], [], []
    A = g.alphabet
    for k in range(g.N):
        lo, hi = g.offsets[k], g.offsets[k + 1]
        src = np.arange(lo, hi)
        local = src - lo
        for (c, delta), val in sorted(coeffs.items()):
            code = c * g.d_space + delta
            dst = g.offsets[k + 1] + code * A**k + local
            rows.append(dst)
            cols.append(src)
            vals.append(np.full(len(src), val, dtype=complex))
    if rows:
        M = sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(g.dim, g.dim)
        )
    else:
        M = sp.csr_matrix((g.dim, g.dim), dtype=complex)
    return FockOp(g, M, 1, amp.support())


def annihilation(g: GridSpec, amp: Amplitude) -> FockOp:
    """``A(amp)``, the adjoint of creation (conjugate-linear in ``amp``)."""
    return dataclasses.replace(creation(g, amp).H, raises=0)


def preservation(g: GridSpec, T_op, r, s) -> FockOp:
    """``Λ(T)`` restricted in time to ``[r, s]``: acts on the first tensor leg."""
    cells = g.cells(r, s)
    D = g.d_space
    T = np.array([[complex(x) for x in row] for row in T_op], dtype=complex)
    if T.shape != (D, D):
        raise ValueError(f"T must be {D}x{D}")
    rows, cols, vals = [], [], []
    A = g.alphabet
    for k in range(1, g.N + 1):
        base = g.offsets[k]
        tail = A ** (k - 1)
        local = np.arange(tail)
        for c in cells:
            for d_in in range(D):
                for d_out in range(D):
                    val = T[d_out, d_in]
                    if val == 0:
                        continue
                    rows.append(base + (c * D + d_out) * tail + local)
                    cols.append(base + (c * D + d_in) * tail + local)
                    vals.append(np.full(tail, val, dtype=complex))
    if rows:
        M = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(g.dim, g.dim))
    else:
        M = sp.csr_matrix((g.dim, g.dim), dtype=complex)
    return FockOp(g, M, 0, (Fraction(r), Fraction(s)) if len(cells) else None)


def block_matrix(g: GridSpec, entries: Sequence[Sequence[FockOp]]) -> FockOp:
    """Assemble a d×d matrix of operators into one operator on ``C^d ⊗ Γ``."""
    d = len(entries)
    M = sp.bmat([[e.matrix for e in row] for row in entries], format="csr")
    raises = max(e.raises for row in entries for e in row)
    supp = None
    for row in entries:
        for e in row:
            supp = _hull(supp, e.support)
    return FockOp(g, M, raises, supp, d)


def shift_permutation(g: GridSpec, r, blocks: int = 1) -> sp.csr_matrix:
    """Cyclic cell permutation moving every cell by ``-r`` (one unitary per block)."""
    k = g.cell(abs(Fraction(r))) * (1 if Fraction(r) >= 0 else -1)
    perm = np.empty(g.dim, dtype=np.int64)
    A, D = g.alphabet, g.d_space
    perm[0] = 0
    for deg in range(1, g.N + 1):
        lo = g.offsets[deg]
        idx = np.arange(A**deg)
        new = np.zeros_like(idx)
        rest = idx.copy()
        scale = 1
        for _ in range(deg):
            rest, code = np.divmod(rest, A)
            c, delta = np.divmod(code, D)
            c2 = (c - k) % g.m
            new = new + (c2 * D + delta) * scale
            scale *= A
        perm[lo + idx] = lo + new
    P = sp.csr_matrix((np.ones(g.dim, dtype=complex), (perm, np.arange(g.dim))), shape=(g.dim, g.dim))
    if blocks > 1:
        P = sp.block_diag([P] * blocks, format="csr")
    return P


def time_shift_op(g: GridSpec, M: FockOp, r) -> FockOp:
    """``s_r M s_r*`` where ``s_r`` moves supports from ``[a, b]`` to ``[a - r, b - r]``."""
    r = Fraction(r)
    if M.support is not None:
        a, b = M.support
        if a - r < 0 or b - r > g.T_max:
            raise SupportOverflowError(f"support [{a}, {b}] shifted by {-r} leaves [0, {g.T_max}]")
    g.cell(abs(r))
    if r == 0:
        return M
    P = shift_permutation(g, r, M.blocks)
    supp = None if M.support is None else (M.support[0] - r, M.support[1] - r)
    return FockOp(g, (P @ M.matrix @ P.T).tocsr(), M.raises, supp, M.blocks)
