"""Increment operators, partition-net products and their defects on the truncated space.

Net products are kept lazy (:class:`Product`, :class:`LinComb`) so that a
product of dozens of sparse factors is never formed explicitly; all norms are
power-iteration estimates through matrix-vector products.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..functionals import NetReport, Partition
from ..ncalg import GeneratorSymbol
from .space import (
    Amplitude,
    FockOp,
    GridSpec,
    annihilation,
    block_matrix,
    creation,
    identity,
    preservation,
    time_shift_op,
)

POWER_ITERATIONS = 50


class Product:
    """Lazy ordered product; the rightmost factor acts first."""

    def __init__(self, factors: Sequence):
        flat = []
        for f in factors:
            flat.extend(f.factors if isinstance(f, Product) else [f])
        self.factors = tuple(flat)

    @property
    def grid(self) -> GridSpec:
        return self.factors[0].grid

    @property
    def blocks(self) -> int:
        return self.factors[0].blocks

    @property
    def dim(self) -> int:
        return self.grid.dim * self.blocks

    def apply(self, v: np.ndarray) -> np.ndarray:
        for f in reversed(self.factors):
            v = f.apply(v)
        return v

    def apply_adjoint(self, v: np.ndarray) -> np.ndarray:
        for f in self.factors:
            v = f.apply_adjoint(v)
        return v

    def apply_tracked(self, v: np.ndarray) -> tuple[np.ndarray, bool]:
        """Apply and report whether any creation hit the truncation boundary."""
        deg = np.tile(self.grid.degree_of_index, self.blocks)
        leaked = False
        for f in reversed(self.factors):
            raises = getattr(f, "raises", 0)
            if raises and np.any(v[deg > self.grid.N - raises] != 0):
                leaked = True
            v = f.apply(v)
        return v, leaked

    @property
    def H(self) -> Product:
        return Product([f.H for f in reversed(self.factors)])

    def __matmul__(self, other):
        return Product([self, other])

    def __add__(self, other):
        return LinComb([(1, self), (1, other)])

    def __sub__(self, other):
        return LinComb([(1, self), (-1, other)])

    def shifted(self, r) -> Product:
        return Product([time_shift(f, r) for f in self.factors])


class LinComb:
    """Lazy linear combination of operators (identity allowed as the string ``"id"``)."""

    def __init__(self, terms: Sequence):
        self.terms = tuple(terms)
        for _, op in self.terms:
            if op != "id":
                self.grid, self.blocks = op.grid, op.blocks
                break

    def apply(self, v):
        out = np.zeros_like(v)
        for c, op in self.terms:
            out = out + complex(c) * (v if op == "id" else op.apply(v))
        return out

    def apply_adjoint(self, v):
        out = np.zeros_like(v)
        for c, op in self.terms:
            out = out + complex(c).conjugate() * (v if op == "id" else op.apply_adjoint(v))
        return out

    @property
    def H(self) -> LinComb:
        return LinComb([(complex(c).conjugate(), op if op == "id" else op.H) for c, op in self.terms])

    def __matmul__(self, other):
        return Product([self, other])

    def __add__(self, other):
        return LinComb(list(self.terms) + [(1, other)])

    def __sub__(self, other):
        return LinComb(list(self.terms) + [(-1, other)])


def _dim(op) -> int:
    return op.grid.dim * op.blocks


def op_norm(op, iterations: int = POWER_ITERATIONS) -> float:
    """Operator norm estimate: power iteration on ``M†M`` from the normalised all-ones vector."""
    n = _dim(op)
    v = np.ones(n, dtype=complex) / math.sqrt(n)
    for _ in range(iterations):
        w = op.apply_adjoint(op.apply(v))
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = w / nw
    return float(np.linalg.norm(op.apply(v)))


def time_shift(op, r):
    """Conjugate by the cell shift moving supports from ``[a, b]`` to ``[a - r, b - r]``."""
    if isinstance(op, FockOp):
        return time_shift_op(op.grid, op, r)
    if isinstance(op, Product):
        return op.shifted(r)
    if isinstance(op, LinComb):
        return LinComb([(c, o if o == "id" else time_shift(o, r)) for c, o in op.terms])
    raise TypeError(f"cannot shift {type(op).__name__}")


# ----------------------------------------------------------------------------
# increments


def _require_gen(t):
    for g, rho in t.rho_gen.items():
        dl = t.delta((g,))
        if any(rho[i][j] != (dl if i == j else 0) for i in range(t.D) for j in range(t.D)):
            raise ValueError(f"rho({g}) is not δ({g})·id; the K<d> increment needs a matrix-built triple")


def generator_increment(g: GridSpec, t, gen: GeneratorSymbol, r, s, with_preservation: bool = True) -> FockOp:
    """One entry ``δ + A*(χ⊗η(gen)) + Λ(ρ − δ) + A(χ⊗η(gen*)) + (s−r)Ψ(gen)``."""
    r, s = Fraction(r), Fraction(s)
    g.cells(r, s)
    gen = gen.with_tag(1)
    dl = t.delta((gen,))
    op = identity(g) * complex(dl + t.psi_gen[gen] * (s - r))
    eta, eta_star = t.eta_gen[gen], t.eta_gen[gen.star()]
    if any(eta):
        op = op + creation(g, Amplitude.indicator(r, s, eta))
    if any(eta_star):
        op = op + annihilation(g, Amplitude.indicator(r, s, eta_star))
    if with_preservation:
        T = [[t.rho_gen[gen][i][j] - (dl if i == j else 0) for j in range(t.D)] for i in range(t.D)]
        if any(x for row in T for x in row):
            op = op + preservation(g, T, r, s)
    return op


def h_increment(g: GridSpec, t, r, s) -> FockOp:
    """The operator matrix ``(h_{r,s}(x_{kl}))_{kl}`` as one block operator."""
    _require_gen(t)
    if g.d_space != t.D:
        raise ValueError(f"grid D-dimension {g.d_space} differs from the triple's {t.D}")
    d = t.dsg.d
    alg = t.dsg
    return block_matrix(
        g, [[generator_increment(g, t, alg.sym(k, l), r, s) for l in range(1, d + 1)] for k in range(1, d + 1)]
    )


def additive_increment(g: GridSpec, t, s, tp, v: GeneratorSymbol) -> FockOp:
    """Additive free white-noise increment ``I_{s,t'}(v)`` of a tensor-algebra triple."""
    s, tp = Fraction(s), Fraction(tp)
    v = v.with_tag(1)
    op = identity(g) * complex(t.psi_gen[v] * (tp - s))
    if any(t.eta_gen[v]):
        op = op + creation(g, Amplitude.indicator(s, tp, t.eta_gen[v]))
    if any(t.eta_gen[v.star()]):
        op = op + annihilation(g, Amplitude.indicator(s, tp, t.eta_gen[v.star()]))
    rho = t.rho_gen[v]
    if any(x for row in rho for x in row):
        op = op + preservation(g, rho, s, tp)
    return op


def theta(g: GridSpec, t, alpha: Partition) -> Product:
    """``Θ_α = g_{t_1,t_2} ⋯ g_{t_n,t_{n+1}}``, lazily."""
    return Product([h_increment(g, t, r, s) for r, s in alpha.pieces()])


def block_identity(g: GridSpec, blocks: int) -> FockOp:
    return identity(g, blocks)


def estimate_U(g: GridSpec, t, R, S, depths: Sequence[int]) -> tuple[Product, NetReport]:
    """Θ over dyadic partitions of ``[R, S]``; residuals are norm estimates of successive differences."""
    schedule = [Partition.dyadic(R, S, j) for j in depths]
    thetas = [theta(g, t, a) for a in schedule]
    vac = _block_vacuum(g, t.dsg.d)
    values = [np.vdot(vac, th.apply(vac)) for th in thetas]
    residuals = [op_norm(b - a) for a, b in zip(thetas, thetas[1:])]
    rep = NetReport(schedule, values, residuals, provenance="truncated")
    rep.limit = thetas[-1]
    rep.error = residuals[-1] if residuals else 0.0
    return thetas[-1], rep


def _block_vacuum(g: GridSpec, d: int, k: int = 1) -> np.ndarray:
    v = np.zeros(g.dim * d, dtype=complex)
    v[(k - 1) * g.dim] = 1.0
    return v


def unitarity_defect(M) -> tuple[float, float]:
    """``(‖M*M − E‖, ‖MM* − E‖)`` by power iteration."""
    left = LinComb([(1, Product([M.H, M])), (-1, "id")])
    right = LinComb([(1, Product([M, M.H])), (-1, "id")])
    return op_norm(left), op_norm(right)


def evolution_defect(g: GridSpec, t, r, s, tp, depth: int, depth_second: int | None = None, depth_whole: int | None = None) -> float:
    """``‖Θ_{[r,s]} Θ_{[s,t']} − Θ_{[r,t']}‖``.

    With only ``depth`` given, ``[r, s]`` and ``[s, t']`` are split into
    ``2^depth`` pieces each and the whole interval uses their union, so the two
    sides are literally the same product.
    """
    a1 = Partition.dyadic(r, s, depth)
    a2 = Partition.dyadic(s, tp, depth if depth_second is None else depth_second)
    whole = (a1 | a2) if depth_whole is None else Partition.dyadic(r, tp, depth_whole)
    lhs = Product([theta(g, t, a1), theta(g, t, a2)])
    return op_norm(lhs - theta(g, t, whole))


def upsilon(g: GridSpec, t, alpha: Partition, depth: int) -> tuple[LinComb, float]:
    """``Υ_α = (1 − n) id + Σ_j U_{t_j, t_{j+1}}`` and ``‖Υ_α − g_{R,S}‖``.

    Each ``U`` is the net product over ``2^depth`` equal pieces of its interval.
    """
    n = alpha.n
    terms = [(1 - n, "id")] + [(1, theta(g, t, Partition.dyadic(r, s, depth))) for r, s in alpha.pieces()]
    ups = LinComb(terms)
    return ups, op_norm(ups - h_increment(g, t, alpha.R, alpha.S))


def example_one_increment(g: GridSpec, r, s, drift_sign: int = 1) -> FockOp:
    """``A*(χ) − A(χ) + drift_sign · ½(s − r)`` with ``drift_sign = +1`` the literal form."""
    if g.d_space != 1:
        raise ValueError("the scalar example needs a one-dimensional D")
    chi = Amplitude.indicator(r, s, (1,))
    a = creation(g, chi) - annihilation(g, chi)
    return a + complex(drift_sign * (Fraction(s) - Fraction(r)) / 2)


def example_one_theta(g: GridSpec, alpha: Partition, depths: Sequence[int] = (), drift_sign: int = 1):
    """Net product for the scalar example over ``alpha`` and over dyadic refinements of it.

    Returns ``(Θ_α, report)`` where the report's values are vacuum expectations
    and residuals are norm estimates between successive refinements.
    """
    def net(p: Partition) -> Product:
        return Product([identity(g) + example_one_increment(g, r, s, drift_sign) for r, s in p.pieces()])

    base = net(alpha)
    schedule = [alpha] + [_refine(alpha, j) for j in depths]
    nets = [base] + [net(p) for p in schedule[1:]]
    vac = g.vacuum()
    values = [np.vdot(vac, th.apply(vac)) for th in nets]
    residuals = [op_norm(b - a) for a, b in zip(nets, nets[1:])]
    return base, NetReport(schedule, values, residuals, provenance="truncated")


def _refine(alpha: Partition, depth: int) -> Partition:
    pts = set()
    for r, s in alpha.pieces():
        pts.update(Partition.dyadic(r, s, depth).times)
    return Partition(tuple(sorted(pts)))


def cocycle_defect(g: GridSpec, t, s, tp, width) -> float:
    """``‖W_{s+t'} − W_{t'} · shift(W_s)‖`` where ``W_u`` is the net on ``[0, u]`` with pieces of ``width``.

    ``shift`` moves ``W_s`` from ``[0, s]`` onto ``[t', t' + s]`` (a shift by
    ``−t'`` in the convention of :func:`time_shift`).
    """
    s, tp, width = Fraction(s), Fraction(tp), Fraction(width)

    def W(u):
        n = u / width
        if n.denominator != 1:
            raise ValueError(f"{u} is not a multiple of the piece width {width}")
        return theta(g, t, Partition.equidistant(0, u, int(n)))

    rhs = Product([W(tp), time_shift(W(s), -tp)])
    return op_norm(W(s + tp) - rhs)


# ----------------------------------------------------------------------------
# moments through truncated matrices


def net_entry_apply(Theta: Product, k: int, l: int, v: np.ndarray, track: bool = False):
    """Apply the ``(k, l)`` entry of an operator matrix to a vector of Γ."""
    n = Theta.grid.dim
    big = np.zeros(n * Theta.blocks, dtype=complex)
    big[(l - 1) * n : l * n] = v
    if track:
        out, leaked = Theta.apply_tracked(big)
    else:
        out, leaked = Theta.apply(big), False
    return out[(k - 1) * n : k * n], leaked


def truncated_net_moment(g: GridSpec, t, letters) -> tuple[complex, bool]:
    """``⟨Ω, f_{α_1}(b_1) ⋯ f_{α_k}(b_k) Ω⟩`` on the truncated space, plus the leak flag.

    ``f_α(x_{kl})`` is the ``(k, l)`` entry of ``Θ_α`` and ``f_α(x*_{kl})`` that of
    ``Θ_α†``.
    """
    cache: dict = {}

    def net(alpha, starred):
        key = (alpha, starred)
        if key not in cache:
            th = theta(g, t, alpha)
            cache[key] = th.H if starred else th
        return cache[key]

    expansions = [[(m, c, alpha) for m, c in b.items()] for b, alpha in letters]
    import itertools

    total = 0j
    leaked = False
    for combo in itertools.product(*expansions):
        v = g.vacuum()
        coef = 1 + 0j
        seq = []
        for m, c, alpha in combo:
            coef *= complex(c)
            seq.extend((gen, alpha) for gen in m)
        for gen, alpha in reversed(seq):
            v, lk = net_entry_apply(net(alpha, gen.starred), gen.row, gen.col, v, track=True)
            leaked = leaked or lk
        total += coef * v[0]
    return total, leaked
