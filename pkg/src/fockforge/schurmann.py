"""Schürmann triples (rho, eta, psi) and conditional positivity checks.

Vectors in the cocycle space are tuples of scalars; ``rho`` values are tuples
of row tuples.  The inner product is conjugate-linear in its first slot.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .functionals import Functional
from .ncalg import (
    KD,
    DualSemigroup,
    NCPoly,
    TensorAlgebra,
    counit,
    kd_relations,
    mono_star,
    reduce_by_relations,
)
from .scalars import GaussianRational, ScalarModeError, exact, parse_pair

MINUS = "minus"
PAPER_PLUS = "paper_plus"


def inner(u: Sequence, v: Sequence):
    total = exact(0)
    for a, b in zip(u, v):
        total = total + a.conjugate() * b
    return total


def _vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _vscale(c, u):
    return tuple(c * a for a in u)


def _matvec(M, v):
    return tuple(sum((M[i][j] * v[j] for j in range(len(v))), exact(0)) for i in range(len(M)))


def _matmul(A, B):
    n, m, k = len(A), len(B), len(B[0])
    return tuple(
        tuple(sum((A[i][p] * B[p][j] for p in range(m)), exact(0)) for j in range(k)) for i in range(n)
    )


@dataclass(frozen=True, eq=False)
class SchurmannTriple:
    dsg: DualSemigroup
    D: int
    rho_gen: dict
    eta_gen: dict
    psi_gen: dict
    L: tuple | None = None
    psi_sign: str = MINUS
    _eta_cache: dict = field(default_factory=dict, repr=False)
    _psi_cache: dict = field(default_factory=dict, repr=False)
    _rho_cache: dict = field(default_factory=dict, repr=False)

    @property
    def d(self) -> int:
        return self.dsg.d if isinstance(self.dsg, KD) else self.dsg.dim

    def zero_vector(self):
        return tuple(exact(0) for _ in range(self.D))

    def identity(self):
        return tuple(tuple(exact(1 if i == j else 0) for j in range(self.D)) for i in range(self.D))

    def rho(self, m: tuple):
        m = tuple(m)
        if not m:
            return self.identity()
        v = self._rho_cache.get(m)
        if v is None:
            v = self.rho_gen[m[0]] if len(m) == 1 else _matmul(self.rho_gen[m[0]], self.rho(m[1:]))
            self._rho_cache[m] = v
        return v

    def delta(self, m: tuple):
        return counit(self.dsg, NCPoly.monomial(m, 1, self.dsg)) if m else exact(1)

    def eta_mono(self, m: tuple):
        m = tuple(m)
        if not m:
            return self.zero_vector()
        v = self._eta_cache.get(m)
        if v is None:
            if len(m) == 1:
                v = self.eta_gen[m[0]]
            else:
                a, rest = m[:1], m[1:]
                v = _vadd(_matvec(self.rho(a), self.eta_mono(rest)), _vscale(self.delta(rest), self.eta_gen[m[0]]))
            self._eta_cache[m] = v
        return v

    def psi_mono(self, m: tuple):
        m = tuple(m)
        if not m:
            return exact(0)
        v = self._psi_cache.get(m)
        if v is None:
            if len(m) == 1:
                v = self.psi_gen[m[0]]
            else:
                a, rest = m[:1], m[1:]
                v = (
                    self.psi_gen[m[0]] * self.delta(rest)
                    + self.delta(a) * self.psi_mono(rest)
                    + inner(self.eta_gen[mono_star(a)[0]], self.eta_mono(rest))
                )
            self._psi_cache[m] = v
        return v

    def psi_functional(self) -> Functional:
        return Functional(self.dsg, self.psi_mono, unital=False, name=f"psi[{self.psi_sign}]")

    def with_sign(self, psi_sign: str) -> SchurmannTriple:
        if self.L is None:
            raise ValueError("sign switch only applies to matrix-built triples")
        return triple_from_matrix(self.L, psi_sign)


def _as_exact_matrix(L) -> tuple:
    rows = []
    for row in L:
        new = []
        for e in row:
            if isinstance(e, GaussianRational):
                new.append(e)
            elif isinstance(e, (list, tuple)):
                new.append(parse_pair(e))
            elif isinstance(e, (float, complex)):
                raise ScalarModeError("matrix entries must be exact (ints, fractions or decimal strings)")
            else:
                new.append(exact(e))
        rows.append(tuple(new))
    d = len(rows)
    if d == 0 or any(len(r) != d for r in rows):
        raise ValueError("L must be a nonempty square matrix")
    return tuple(rows)


def gram_of_matrix(L) -> tuple:
    """``L* L`` with ``(L*L)_{kl} = sum_p conj(L_{pk}) L_{pl}``."""
    d = len(L)
    return tuple(
        tuple(sum((L[p][k].conjugate() * L[p][l] for p in range(d)), exact(0)) for l in range(d)) for k in range(d)
    )


def triple_from_matrix(L, psi_sign: str = MINUS) -> SchurmannTriple:
    """Triple on K<d> with one-dimensional cocycle space built from a d×d matrix."""
    if psi_sign not in (MINUS, PAPER_PLUS):
        raise ValueError(f"psi_sign must be {MINUS!r} or {PAPER_PLUS!r}")
    L = _as_exact_matrix(L)
    d = len(L)
    alg = KD(d)
    G = gram_of_matrix(L)
    half = exact(1, 0) / 2 * (-1 if psi_sign == MINUS else 1)
    rho, eta, psi = {}, {}, {}
    for k in range(1, d + 1):
        for l in range(1, d + 1):
            x, xs = alg.sym(k, l), alg.sym(k, l, True)
            unit = ((exact(1 if k == l else 0),),)
            rho[x] = rho[xs] = unit
            eta[x] = (L[k - 1][l - 1],)
            eta[xs] = (-L[l - 1][k - 1],)
            psi[x] = half * G[k - 1][l - 1]
            psi[xs] = psi[x].conjugate()
    return SchurmannTriple(alg, 1, rho, eta, psi, L, psi_sign)


def eta_extend(t: SchurmannTriple, p: NCPoly):
    out = t.zero_vector()
    for m, c in p.terms.items():
        if any(g.tag != 1 for g in m):
            raise ValueError("eta_extend expects an untagged polynomial")
        out = _vadd(out, _vscale(c, t.eta_mono(m)))
    return out


def psi_extend(t: SchurmannTriple, p: NCPoly):
    total = exact(0)
    for m, c in p.terms.items():
        if any(g.tag != 1 for g in m):
            raise ValueError("psi_extend expects an untagged polynomial")
        total = total + c * t.psi_mono(m)
    return total


def tensor_triple(dim: int, D: int, eta: dict, psi: dict, rho: dict | None = None) -> SchurmannTriple:
    """Triple on T(V) from data on the basis ``v_i``; starred values follow by adjoint.

    ``eta`` maps ``(i, starred)`` to a D-vector, ``psi`` maps ``i`` to a scalar and
    ``rho`` maps ``i`` to a D×D matrix (zero if omitted).
    """
    alg = TensorAlgebra(dim)
    zero_mat = tuple(tuple(exact(0) for _ in range(D)) for _ in range(D))
    r, e, s = {}, {}, {}
    for i in range(1, dim + 1):
        v, vs = alg.sym(i), alg.sym(i, True)
        M = tuple(tuple(exact(c) for c in row) for row in rho[i]) if rho and i in rho else zero_mat
        r[v] = M
        r[vs] = tuple(tuple(M[b][a].conjugate() for b in range(D)) for a in range(D))
        e[v] = tuple(exact(c) for c in eta[(i, False)])
        e[vs] = tuple(exact(c) for c in eta[(i, True)])
        s[v] = exact(psi[i])
        s[vs] = s[v].conjugate()
    return SchurmannTriple(alg, D, r, e, s)


def kernel_tensor_triple(t: SchurmannTriple) -> tuple[SchurmannTriple, dict]:
    """The white-noise triple on T(V), V spanned by ``x_{kl} - δ_{kl}𝟙``.

    Returns the triple and the map ``(k, l) -> basis index``.
    """
    if not isinstance(t.dsg, KD):
        raise ValueError("expects a K<d> triple")
    d = t.dsg.d
    index = {(k, l): (k - 1) * d + l for k in range(1, d + 1) for l in range(1, d + 1)}
    eta, psi, rho = {}, {}, {}
    for (k, l), i in index.items():
        x, xs = t.dsg.sym(k, l), t.dsg.sym(k, l, True)
        eta[(i, False)] = t.eta_gen[x]
        eta[(i, True)] = t.eta_gen[xs]
        psi[i] = t.psi_gen[x]
        unit = exact(1 if k == l else 0)
        rho[i] = tuple(tuple(t.rho_gen[x][a][b] - (unit if a == b else 0) for b in range(t.D)) for a in range(t.D))
    return tensor_triple(d * d, t.D, eta, psi, rho), index


@dataclass
class GeneratorReport:
    hermitian_ok: bool
    unit_ok: bool
    gram_psd_ok: bool
    min_eigenvalue: float
    gram: list
    witnesses: list

    @property
    def ok(self) -> bool:
        return self.hermitian_ok and self.unit_ok and self.gram_psd_ok


def kernel_samples(d: int) -> list[NCPoly]:
    """``x_{kl} - δ_{kl}𝟙`` and ``x*_{kl} - δ_{kl}𝟙`` for all k, l."""
    alg = KD(d)
    out = []
    for starred in (False, True):
        for k in range(1, d + 1):
            for l in range(1, d + 1):
                g = alg.xs(k, l) if starred else alg.x(k, l)
                out.append(g - (1 if k == l else 0))
    return out


def validate_generator(t: SchurmannTriple, kernel_basis: Sequence[NCPoly], tol: float = 1e-12) -> GeneratorReport:
    """Hermitian, unit and conditional-positivity checks of ``psi``.

    Products ``b_i* b_j`` are first reduced modulo the span of the K<d>
    relations (with multiples up to the needed degree), so a ``psi`` that does
    not vanish on the relations is exposed instead of masked by the product
    rule.
    """
    for b in kernel_basis:
        if counit(t.dsg, b) != 0:
            raise ValueError(f"sample {b} is not in the kernel of the counit")
    rels = kd_relations(t.dsg.d) if isinstance(t.dsg, KD) else []
    monos = {m for b in kernel_basis for m in b.terms}
    herm = all(t.psi_mono(mono_star(m)) == t.psi_mono(m).conjugate() for m in monos)
    unit_ok = t.psi_mono(()) == 0
    n = len(kernel_basis)
    gram = [[exact(0)] * n for _ in range(n)]
    for i, bi in enumerate(kernel_basis):
        for j, bj in enumerate(kernel_basis):
            q = bi.star() * bj
            if rels:
                q = reduce_by_relations(q, rels)
            gram[i][j] = psi_extend(t, q)
    if n == 0:
        return GeneratorReport(herm, unit_ok, True, 0.0, gram, [])
    G = np.array([[complex(v) for v in row] for row in gram])
    w, V = np.linalg.eigh((G + G.conj().T) / 2)
    psd = bool(w[0] >= -tol)
    witnesses = [] if psd else [V[:, 0]]
    hermitian_gram = all(gram[i][j] == gram[j][i].conjugate() for i in range(n) for j in range(n))
    return GeneratorReport(herm and hermitian_gram, unit_ok, psd, float(w[0]), gram, witnesses)
