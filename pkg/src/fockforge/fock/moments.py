"""Exact vacuum expectations on the (untruncated) full Fock space.

Two independent engines:

* :func:`vacuum_moment` pushes exact Fock vectors (sums of tuples of step
  amplitudes) through a product of operator sums, right to left.  It handles
  creation, annihilation, preservation and scalars, and needs no truncation.
* :func:`net_vacuum_moment` sums non-crossing pairings of creation and
  annihilation parts over the site chain of a net product.  It is quadratic in
  the chain length and is what makes long nets tractable.  Preservation parts
  are not supported there.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import NamedTuple, Sequence

from .. import _ncsum
from ..functionals import Partition, chain_sites
from ..ncalg import GeneratorSymbol, NCPoly, coproduct_n
from ..scalars import EXACT, FLOAT, GaussianRational, exact
from .space import Amplitude


class CRE(NamedTuple):
    amp: Amplitude


class ANN(NamedTuple):
    amp: Amplitude


class PRES(NamedTuple):
    T: tuple
    r: Fraction
    s: Fraction


class SCAL(NamedTuple):
    c: object


def _adjoint_symbol(sym):
    if isinstance(sym, CRE):
        return ANN(sym.amp)
    if isinstance(sym, ANN):
        return CRE(sym.amp)
    if isinstance(sym, PRES):
        n = len(sym.T)
        return PRES(tuple(tuple(sym.T[j][i].conjugate() for j in range(n)) for i in range(n)), sym.r, sym.s)
    return SCAL(sym.c.conjugate())


class OperatorWord(tuple):
    """A formal product of operator symbols, leftmost acting last."""

    def star(self) -> OperatorWord:
        return OperatorWord(_adjoint_symbol(s) for s in reversed(self))

    def __add__(self, other):
        return OperatorWord(tuple(self) + tuple(other))


class OpPoly(dict):
    """Linear combination ``OperatorWord -> coefficient``; the empty word is the identity."""

    @classmethod
    def of(cls, *words_and_coeffs) -> OpPoly:
        out = cls()
        for w, c in words_and_coeffs:
            out.add(OperatorWord(w), c)
        return out

    def add(self, word, c):
        if not isinstance(c, GaussianRational):
            c = exact(c)
        v = self.get(word)
        v = c if v is None else v + c
        if v:
            self[word] = v
        else:
            self.pop(word, None)

    def __mul__(self, other: OpPoly) -> OpPoly:
        out = OpPoly()
        for w1, c1 in self.items():
            for w2, c2 in other.items():
                out.add(w1 + w2, c1 * c2)
        return out

    def star(self) -> OpPoly:
        out = OpPoly()
        for w, c in self.items():
            out.add(w.star(), c.conjugate())
        return out

    def max_annihilations(self) -> int:
        return max((sum(isinstance(s, ANN) for s in w) for w in self), default=0)


class _Amplitudes:
    """Interns amplitudes so that Fock states are keyed by tuples of ints."""

    def __init__(self):
        self.amps: list = []
        self.ids: dict = {}
        self._inner: dict = {}

    def id(self, amp: Amplitude) -> int:
        i = self.ids.get(amp)
        if i is None:
            i = self.ids[amp] = len(self.amps)
            self.amps.append(amp)
        return i

    def inner(self, amp: Amplitude, j: int):
        key = (self.id(amp), j)
        v = self._inner.get(key)
        if v is None:
            v = self._inner[key] = amp.inner(self.amps[j])
        return v


def _apply_symbol(sym, state: dict, amps: _Amplitudes) -> dict:
    out: dict = {}
    if isinstance(sym, SCAL):
        if not sym.c:
            return out
        return {k: v * sym.c for k, v in state.items()}
    if isinstance(sym, CRE):
        head = (amps.id(sym.amp),)
    for parts, coef in state.items():
        if isinstance(sym, CRE):
            key, val = head + parts, coef
        elif not parts:
            continue
        elif isinstance(sym, ANN):
            ip = amps.inner(sym.amp, parts[0])
            if not ip:
                continue
            key, val = parts[1:], coef * ip
        else:
            first = amps.amps[parts[0]].restricted(sym.r, sym.s).mapped(sym.T)
            if first.is_zero():
                continue
            key, val = (amps.id(first),) + parts[1:], coef
        prev = out.get(key)
        val = val if prev is None else prev + val
        if val:
            out[key] = val
        else:
            out.pop(key, None)
    return out


def vacuum_moment(word) -> object:
    """``⟨Ω, X Ω⟩`` exactly, for an OperatorWord, OpPoly or list of OpPoly factors."""
    if isinstance(word, OperatorWord):
        factors = [OpPoly.of((word, 1))]
    elif isinstance(word, OpPoly):
        factors = [word]
    else:
        factors = list(word)
    # remaining annihilation capacity to the left of each factor, for pruning
    capacity = [0] * (len(factors) + 1)
    for i in range(len(factors)):
        capacity[i + 1] = capacity[i] + factors[i].max_annihilations()
    amps = _Amplitudes()
    state: dict = {(): exact(1)}
    for i in range(len(factors) - 1, -1, -1):
        new: dict = {}
        for w, c in factors[i].items():
            part = {k: v * c for k, v in state.items()}
            for sym in reversed(w):
                part = _apply_symbol(sym, part, amps)
                if not part:
                    break
            for k, v in part.items():
                prev = new.get(k)
                v = v if prev is None else prev + v
                if v:
                    new[k] = v
                else:
                    new.pop(k, None)
        left = capacity[i]
        state = {k: v for k, v in new.items() if len(k) <= left}
        if not state:
            return exact(0)
    return state.get((), exact(0))


# ----------------------------------------------------------------------------
# increments as operator sums


def _check_gen_condition(t, g: GeneratorSymbol):
    rho = t.rho_gen[g]
    dl = t.delta((g,))
    return any(rho[i][j] != (dl if i == j else 0) for i in range(t.D) for j in range(t.D))


def increment_oppoly(t, g: GeneratorSymbol, r, s) -> OpPoly:
    """``δ(g) + A*(χ⊗η(g)) + Λ(ρ(g) − δ(g)) + A(χ⊗η(g*)) + (s−r)Ψ(g)`` on ``[r, s]``."""
    r, s = Fraction(r), Fraction(s)
    g = g.with_tag(1)
    out = OpPoly()
    out.add(OperatorWord(), t.delta((g,)) + t.psi_gen[g] * (s - r))
    eta = t.eta_gen[g]
    eta_star = t.eta_gen[g.star()]
    if any(eta):
        out.add(OperatorWord((CRE(Amplitude.indicator(r, s, eta)),)), 1)
    if any(eta_star):
        out.add(OperatorWord((ANN(Amplitude.indicator(r, s, eta_star)),)), 1)
    if _check_gen_condition(t, g):
        dl = t.delta((g,))
        T = tuple(
            tuple(t.rho_gen[g][i][j] - (dl if i == j else 0) for j in range(t.D)) for i in range(t.D)
        )
        out.add(OperatorWord((PRES(T, r, s),)), 1)
    return out


def stack_net_moment(t, letters: Sequence[tuple[NCPoly, Partition]]):
    """``Φ(f_{α_1}(b_1) ⋯ f_{α_k}(b_k))`` by expanding iterated coproducts (small nets only)."""
    expansions = []
    for b, alpha in letters:
        p = coproduct_n(t.dsg, b, alpha.n) if alpha.n > 1 else b
        pieces = alpha.pieces()
        expansions.append([(m, c, pieces) for m, c in p.items()])
    total = exact(0)
    for combo in itertools.product(*expansions):
        coef = exact(1)
        factors = []
        for m, c, pieces in combo:
            coef = coef * c
            for g in m:
                r, s = pieces[g.tag - 1]
                factors.append(increment_oppoly(t, g, r, s))
        total = total + coef * vacuum_moment(factors)
    return total


class _FockPairModel:
    def __init__(self, t, mode: str = EXACT):
        self.t = t
        self.cast = complex if mode == FLOAT else (lambda v: v)
        self.zero = self.cast(exact(0))

    def blocks(self, sites, i):
        r, s = sites[i].tag
        out = []
        for k in range(i + 1, len(sites)):
            site = sites[k]
            if isinstance(site, _ncsum.Active):
                r2, s2 = site.tag
                if min(s, s2) > max(r, r2):
                    out.append((k,))
        return out

    def weight(self, sites, positions, payloads):
        t = self.t
        if len(positions) == 1:
            p = payloads[0]
            if not isinstance(p, GeneratorSymbol):
                return p
            r, s = sites[positions[0]].tag
            return self.cast(t.delta((p,)) + (s - r) * t.psi_gen[p])
        p, q = payloads
        if not (isinstance(p, GeneratorSymbol) and isinstance(q, GeneratorSymbol)):
            return self.zero
        (r1, s1), (r2, s2) = sites[positions[0]].tag, sites[positions[1]].tag
        ov = min(s1, s2) - max(r1, r2)
        ip = exact(0)
        for a, b in zip(t.eta_gen[p.star()], t.eta_gen[q]):
            ip = ip + a.conjugate() * b
        return self.cast(ip * ov)


def net_vacuum_moment(t, letters: Sequence[tuple[NCPoly, Partition]], mode: str = EXACT):
    """``Φ(f_{α_1}(b_1) ⋯ f_{α_k}(b_k))`` with each ``f_α`` the net product over ``α``.

    Each ``b_i`` is expanded into monomials; each letter of a monomial becomes
    the chain of its iterated coproduct with copy ``j`` placed on piece ``j``.
    In float mode the same sum runs in complex doubles.
    """
    for g in t.rho_gen:
        if _check_gen_condition(t, g):
            raise NotImplementedError("preservation parts need the stack engine")
    if mode == FLOAT:
        zero, one = 0j, 1 + 0j
    else:
        zero, one = exact(0), exact(1)
    model = _FockPairModel(t, mode)
    expansions = [[(m, c, alpha) for m, c in b.items()] for b, alpha in letters]
    total = zero
    for combo in itertools.product(*expansions):
        coef = one
        chain_letters = []
        for m, c, alpha in combo:
            coef = coef * (complex(c) if mode == FLOAT else c)
            pieces = alpha.pieces()
            for g in m:
                chain_letters.append((g, pieces))
        if not chain_letters:
            total = total + coef
            continue
        sites = chain_sites(t.dsg, chain_letters, zero, one)
        total = total + coef * _ncsum.chain_sum(sites, model, zero, one)[0][0]
    return total
