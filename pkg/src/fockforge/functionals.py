"""Linear functionals, their free product, and convolution over partition nets.

Three independent evaluators of the free product are provided:

* :func:`free_product_recursion`, the signed subset recursion;
* :func:`free_product_centering`, which expands every letter into its centred
  part plus its mean and drops alternating centred words;
* :func:`free_product_cumulants`, a sum over non-crossing partitions with
  single-copy blocks weighted by free cumulants.

The third one scales to long words and drives :func:`net_convolve`.
"""
from __future__ import annotations

import contextlib
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterable, NamedTuple, Sequence

import numpy as np

from . import _ncsum
from .ncalg import (
    DualSemigroup,
    GeneratorSymbol,
    NCPoly,
    coproduct,
    counit,
    mono_str,
)
from .scalars import EXACT, FLOAT, exact

MAX_RECURSION_LENGTH = 12

_fault = {"sign_flip": False}


@contextlib.contextmanager
def inject_sign_flip():
    """Flip the sign of one recursion term; used to check that self-tests can fail."""
    prev = _fault["sign_flip"]
    _fault["sign_flip"] = True
    try:
        yield
    finally:
        _fault["sign_flip"] = prev


def _one(mode):
    return exact(1) if mode == EXACT else 1 + 0j


def _zero(mode):
    return exact(0) if mode == EXACT else 0j


# ----------------------------------------------------------------------------
# functionals


class Functional:
    """A linear functional given by its values on monomials."""

    def __init__(self, algebra, fn: Callable, unital: bool = True, mode: str = EXACT, name: str = ""):
        self.algebra = algebra
        self._fn = fn
        self.unital = unital
        self.mode = mode
        self.name = name
        self._values: dict = {}

    def value(self, m) -> Any:
        m = tuple(m)
        v = self._values.get(m)
        if v is None:
            v = _one(self.mode) if (not m and self.unital) else self._fn(m)
            self._values[m] = v
        return v

    def __call__(self, p):
        if isinstance(p, NCPoly):
            total = _zero(self.mode)
            for m, c in p.terms.items():
                total = total + c * self.value(m)
            return total
        return self.value(p)

    def is_hermitian(self, monomials: Iterable) -> bool:
        from .ncalg import mono_star

        return all(self.value(mono_star(tuple(m))) == self.value(m).conjugate() for m in monomials)

    def __repr__(self) -> str:
        return f"Functional({self.name or 'anonymous'})"


def counit_functional(dsg: DualSemigroup) -> Functional:
    return Functional(dsg, lambda m: counit(dsg, NCPoly.monomial(m, 1, dsg)), name="counit")


def random_functional(dsg: DualSemigroup, seed, span: int = 5, name: str = "") -> Functional:
    """Unital functional with small Gaussian-rational values, reproducible per monomial."""

    def fn(m):
        rng = random.Random(f"{seed}|{mono_str(m)}")
        return exact(
            Fraction(rng.randint(-span, span), rng.randint(1, span)),
            Fraction(rng.randint(-span, span), rng.randint(1, span)),
        )

    return Functional(dsg, fn, name=name or f"random[{seed}]")


# ----------------------------------------------------------------------------
# words of letters in a free product


class Letter(NamedTuple):
    tag: int
    element: Any


def merge_adjacent(word: Sequence[Letter]) -> list[Letter]:
    out: list[Letter] = []
    for letter in word:
        if out and out[-1].tag == letter.tag:
            out[-1] = Letter(letter.tag, out[-1].element * letter.element)
        else:
            out.append(Letter(*letter))
    return out


def is_alternating(word: Sequence[Letter]) -> bool:
    return all(a.tag != b.tag for a, b in zip(word, word[1:]))


def _check_word(phis, word):
    if not is_alternating(word):
        raise ValueError("word is not alternating; merge adjacent same-copy letters first")
    for letter in word:
        if not 1 <= letter.tag <= len(phis):
            raise ValueError(f"copy tag {letter.tag} out of range for {len(phis)} functionals")


def _mode_of_phis(phis):
    return phis[0].mode if phis else EXACT


def free_product_recursion(phis: Sequence, word: Sequence[Letter]):
    """Free product value by the signed subset recursion over proper subwords."""
    _check_word(phis, word)
    m = len(word)
    mode = _mode_of_phis(phis)
    if m == 0:
        return _one(mode)
    if m > MAX_RECURSION_LENGTH:
        raise ValueError(f"subset recursion capped at length {MAX_RECURSION_LENGTH}, got {m}")
    singles = [phis[l.tag - 1](l.element) for l in word]
    memo: dict = {}
    flip = _fault["sign_flip"]

    def merged(indices: tuple):
        # group consecutive same-tag letters of the subword
        groups: list[list[int]] = []
        for k in indices:
            if groups and word[groups[-1][-1]].tag == word[k].tag:
                groups[-1].append(k)
            else:
                groups.append([k])
        return tuple(tuple(g) for g in groups)

    def element(group):
        e = word[group[0]].element
        for k in group[1:]:
            e = e * word[k].element
        return e

    def value(groups: tuple):
        if groups in memo:
            return memo[groups]
        n = len(groups)
        if n == 0:
            res = _one(mode)
        elif n == 1:
            g = groups[0]
            res = singles[g[0]] if len(g) == 1 else phis[word[g[0]].tag - 1](element(g))
        else:
            gvals = [
                singles[g[0]] if len(g) == 1 else phis[word[g[0]].tag - 1](element(g)) for g in groups
            ]
            res = _zero(mode)
            for size in range(n - 1, -1, -1):
                sign = 1 if (n - size + 1) % 2 == 0 else -1
                if flip and size == 0:
                    sign = -sign
                for subset in itertools.combinations(range(n), size):
                    rest = _one(mode)
                    chosen = set(subset)
                    for j in range(n):
                        if j not in chosen:
                            rest = rest * gvals[j]
                    if not rest:
                        continue
                    flat = tuple(k for j in subset for k in groups[j])
                    sub = value(merged(flat))
                    res = res + sub * rest if sign > 0 else res - sub * rest
        memo[groups] = res
        return res

    return value(merged(tuple(range(m))))


def free_product_centering(phis: Sequence, word: Sequence[Letter]):
    """Free product value from the vanishing of alternating centred words."""
    _check_word(phis, word)
    mode = _mode_of_phis(phis)
    memo: dict = {}

    # letters carry a structural key so memoisation does not need hashable elements
    def value(letters: tuple):
        key = tuple((t, k) for t, k, _ in letters)
        if key in memo:
            return memo[key]
        n = len(letters)
        if n == 0:
            res = _one(mode)
        elif n == 1:
            t, _, e = letters[0]
            res = phis[t - 1](e)
        else:
            means = [phis[t - 1](e) for t, _, e in letters]
            centred = [(t, ("c", k), e - mu) for (t, k, e), mu in zip(letters, means)]
            res = _zero(mode)
            for mask in range((1 << n) - 1):
                coef = _one(mode)
                for j in range(n):
                    if not mask >> j & 1:
                        coef = coef * means[j]
                if not coef:
                    continue
                sub: list = []
                for j in range(n):
                    if mask >> j & 1:
                        t, k, e = centred[j]
                        if sub and sub[-1][0] == t:
                            t0, k0, e0 = sub[-1]
                            sub[-1] = (t, ("m", k0, k), e0 * e)
                        else:
                            sub.append((t, k, e))
                res = res + coef * value(tuple(sub))
        memo[key] = res
        return res

    return value(tuple((l.tag, ("o", i), l.element) for i, l in enumerate(word)))


@lru_cache(maxsize=None)
def noncrossing_partitions(n: int) -> tuple:
    """All non-crossing partitions of ``range(n)`` as tuples of blocks."""
    if n == 0:
        return ((),)
    out = []
    # the block containing 0 is {0} ∪ rest; split the remaining points accordingly
    for r in range(0, n):
        for others in itertools.combinations(range(1, n), r):
            block = (0,) + others
            segments = []
            bounds = list(block) + [n]
            for a, b in zip(bounds, bounds[1:]):
                segments.append(tuple(range(a + 1, b)))
            partial = [[block]]
            for seg in segments:
                new = []
                for p in partial:
                    for sp in noncrossing_partitions(len(seg)):
                        new.append(p + [tuple(seg[i] for i in blk) for blk in sp])
                partial = new
            out.extend(tuple(sorted(p)) for p in partial)
    return tuple(out)


class FreeCumulants:
    """Multivariate free cumulants of one functional, by Möbius inversion."""

    def __init__(self, moment: Callable[[tuple], Any], zero):
        self.moment = moment
        self.zero = zero
        self._cache: dict = {}

    def __call__(self, seq: tuple):
        v = self._cache.get(seq)
        if v is not None:
            return v
        r = len(seq)
        total = self.moment(seq)
        if r > 1:
            for pi in noncrossing_partitions(r):
                if len(pi) == 1:
                    continue
                term = None
                for blk in pi:
                    k = self(tuple(seq[i] for i in blk))
                    term = k if term is None else term * k
                    if not term:
                        break
                if term:
                    total = total - term
        self._cache[seq] = total
        return total


class _WordCumulantModel:
    def __init__(self, phis, word, mode):
        self.word = word
        self.mode = mode
        self.kappas = {}
        for t in {l.tag for l in word}:
            phi = phis[t - 1]

            def moment(seq, phi=phi):
                e = word[seq[0]].element
                for k in seq[1:]:
                    e = e * word[k].element
                return phi(e)

            self.kappas[t] = FreeCumulants(moment, _zero(mode))

    def blocks(self, sites, i):
        return _ncsum.same_tag_subsets(sites, i, len(sites))

    def weight(self, sites, positions, payloads):
        return self.kappas[sites[positions[0]].tag](payloads)


def free_product_cumulants(phis: Sequence, word: Sequence[Letter]):
    """Free product value as a sum over single-copy non-crossing partitions.

    Works on any word (adjacent same-copy letters need not be merged).
    """
    for letter in word:
        if not 1 <= letter.tag <= len(phis):
            raise ValueError(f"copy tag {letter.tag} out of range for {len(phis)} functionals")
    mode = _mode_of_phis(phis)
    sites = [_ncsum.Active(((i,),), l.tag) for i, l in enumerate(word)]
    model = _WordCumulantModel(phis, list(word), mode)
    return _ncsum.chain_sum(sites, model, _zero(mode), _one(mode))[0][0]


def tagged_word(p_monomial: tuple, dsg=None, mode: str = EXACT) -> list[Letter]:
    """Split a tagged monomial into a merged word of untagged single-copy letters."""
    word: list[Letter] = []
    for g in p_monomial:
        mono = NCPoly.monomial((g.with_tag(1),), 1, dsg, mode)
        if word and word[-1].tag == g.tag:
            word[-1] = Letter(g.tag, word[-1].element * mono)
        else:
            word.append(Letter(g.tag, mono))
    return word


def free_product_poly(phis: Sequence, p: NCPoly, evaluator: Callable = free_product_recursion):
    """Evaluate ``⊙ phis`` on a tagged polynomial term by term."""
    total = _zero(p.mode)
    for m, c in p.items():
        total = total + c * evaluator(phis, tagged_word(m, p.algebra, p.mode))
    return total


def convolve(phi1: Functional, phi2: Functional, dsg: DualSemigroup, b: NCPoly):
    """``(phi1 ⊙ phi2) ∘ Δ`` evaluated at ``b``."""
    for phi in (phi1, phi2):
        if phi.algebra is not None and phi.algebra != dsg:
            raise ValueError(f"functional {phi!r} lives on {phi.algebra}, not {dsg}")
    return free_product_poly([phi1, phi2], coproduct(dsg, b))


# ----------------------------------------------------------------------------
# partitions and increment families


@dataclass(frozen=True)
class Partition:
    times: tuple

    def __post_init__(self):
        ts = tuple(Fraction(t) for t in self.times)
        if len(ts) < 2:
            raise ValueError("a partition needs at least two points")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("partition points must be strictly increasing")
        object.__setattr__(self, "times", ts)

    @classmethod
    def equidistant(cls, R, S, n: int) -> Partition:
        R, S = Fraction(R), Fraction(S)
        return cls(tuple(R + (S - R) * i / n for i in range(n + 1)))

    @classmethod
    def dyadic(cls, R, S, depth: int) -> Partition:
        return cls.equidistant(R, S, 2**depth)

    @property
    def R(self) -> Fraction:
        return self.times[0]

    @property
    def S(self) -> Fraction:
        return self.times[-1]

    @property
    def n(self) -> int:
        return len(self.times) - 1

    @property
    def mesh(self) -> Fraction:
        return max(b - a for a, b in zip(self.times, self.times[1:]))

    def pieces(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip(self.times, self.times[1:]))

    def refines(self, other: Partition) -> bool:
        """True when this partition contains every point of ``other``."""
        return self.R == other.R and self.S == other.S and set(other.times) <= set(self.times)

    def shifted(self, r) -> Partition:
        return Partition(tuple(t + Fraction(r) for t in self.times))

    def restrict(self, a, b) -> Partition:
        a, b = Fraction(a), Fraction(b)
        return Partition((a,) + tuple(t for t in self.times if a < t < b) + (b,))

    def __or__(self, other: Partition) -> Partition:
        return Partition(tuple(sorted(set(self.times) | set(other.times))))


@dataclass
class IncrementFamily:
    """``k_t = δ + tΨ + R_t`` on monomials."""

    dsg: DualSemigroup
    psi: Functional
    remainder: Callable | None = None
    mode: str = EXACT

    def value(self, t, m: tuple):
        t = exact(t) if self.mode == EXACT else complex(float(t))
        v = counit(self.dsg, NCPoly.monomial(m, 1, self.dsg, EXACT)) if m else exact(1)
        if self.mode == FLOAT:
            v = complex(v)
        v = v + t * self.psi.value(m)
        if self.remainder is not None and m:
            v = v + self.remainder(t, m)
        return v

    def functional(self, t) -> Functional:
        return Functional(self.dsg, lambda m: self.value(t, m), mode=self.mode, name=f"k[{t}]")


def chain_sites(dsg: DualSemigroup, letters: Sequence[tuple[GeneratorSymbol, Sequence]], zero, one):
    """Site chain for a product of iterated coproducts.

    ``letters`` lists ``(generator, tags)`` where ``tags[i]`` labels copy ``i+1``
    of that letter's iterated coproduct.  The chain's single entry is the
    corresponding tagged monomial sum.
    """
    sites: list = []
    prev_size = prev_end = None
    for g, tags in letters:
        size, start, end, reverse, entry = dsg.chain(g.with_tag(1))
        if prev_size is None:
            sites.append(_ncsum.row_glue(size, start, zero, one))
        else:
            sites.append(_ncsum.link_glue(prev_size, prev_end, size, start, zero, one))
        mat = tuple(
            tuple(e if isinstance(e, GeneratorSymbol) else (one if e else zero) for e in (entry(a, b) for b in range(size)))
            for a in range(size)
        )
        order = list(tags)[::-1] if reverse else list(tags)
        for tag in order:
            sites.append(_ncsum.Active(mat, tag))
        prev_size, prev_end = size, end
    if prev_size is None:
        return []
    sites.append(_ncsum.col_glue(prev_size, prev_end, zero, one))
    return sites


class _NetCumulantModel:
    def __init__(self, fam: IncrementFamily, max_order: int):
        self.fam = fam
        self.max_order = max_order
        self._kappa: dict = {}
        self.zero = _zero(fam.mode)

    def kappa(self, t):
        k = self._kappa.get(t)
        if k is None:
            k = FreeCumulants(lambda seq: self.fam.value(t, seq), self.zero)
            self._kappa[t] = k
        return k

    def blocks(self, sites, i):
        return _ncsum.same_tag_subsets(sites, i, self.max_order)

    def weight(self, sites, positions, payloads):
        if len(payloads) == 1:
            p = payloads[0]
            if not isinstance(p, GeneratorSymbol):
                return p
            return self.fam.value(sites[positions[0]].tag[1], (p,))
        if not all(isinstance(p, GeneratorSymbol) for p in payloads):
            return self.zero
        return self.kappa(sites[positions[0]].tag[1])(tuple(payloads))


def net_convolve(fam: IncrementFamily, dsg: DualSemigroup, alpha: Partition, b: NCPoly):
    """``(k_{Δt_1} ⊙ … ⊙ k_{Δt_n}) ∘ Δ_n`` at ``b`` over the pieces of ``alpha``."""
    mode = fam.mode
    zero, one = _zero(mode), _one(mode)
    if alpha.n == 1:
        return fam.functional(alpha.S - alpha.R)(b)
    tags = [(i, s - r) for i, (r, s) in enumerate(alpha.pieces())]
    total = zero
    for m, c in b.items():
        if any(g.tag != 1 for g in m):
            raise ValueError("net_convolve expects an untagged polynomial")
        if not m:
            total = total + c
            continue
        sites = chain_sites(dsg, [(g, tags) for g in m], zero, one)
        model = _NetCumulantModel(fam, max_order=len(m) + 1)
        total = total + c * _ncsum.chain_sum(sites, model, zero, one)[0][0]
    return total


@dataclass
class NetReport:
    schedule: list
    values: list
    residuals: list = field(default_factory=list)
    limit: Any = None
    error: float | None = None
    C: float | None = None
    provenance: str = "extrapolated"

    def __post_init__(self):
        if not self.residuals and len(self.values) > 1:
            self.residuals = [abs(complex(b) - complex(a)) for a, b in zip(self.values, self.values[1:])]
        if len(self.residuals) != max(len(self.values) - 1, 0):
            raise ValueError("residuals must have one entry fewer than values")

    def rate(self) -> float | None:
        """Observed convergence order from the last two residuals (log2 ratio)."""
        if len(self.residuals) < 2 or not self.residuals[-1] or not self.residuals[-2]:
            return None
        return math.log2(self.residuals[-2] / self.residuals[-1])


def richardson(values: Sequence, order: int = 1):
    """First-order Richardson step on dyadic halving: ``2 v_J - v_{J-1}``."""
    if len(values) < 2:
        return values[-1]
    f = 2**order
    return (values[-1] * f - values[-2]) / (f - 1)


def conv_exp(fam: IncrementFamily, dsg: DualSemigroup, T, b: NCPoly, depths: Sequence[int]) -> NetReport:
    """Net convolution over dyadic partitions of ``[0, T]`` with extrapolation."""
    if not depths:
        raise ValueError("depth schedule must be nonempty")
    schedule = [Partition.dyadic(0, T, j) for j in depths]
    values = [net_convolve(fam, dsg, alpha, b) for alpha in schedule]
    rep = NetReport(schedule, values)
    rep.limit = richardson(values)
    rep.error = rep.residuals[-1] if rep.residuals else 0.0
    return rep


# ----------------------------------------------------------------------------
# independence axioms


class SubWord:
    """A word of letters treated as a single element of a grouped copy."""

    __slots__ = ("letters",)

    def __init__(self, letters):
        self.letters = tuple(letters)

    def __mul__(self, other):
        return SubWord(self.letters + other.letters)


class _GroupedFunctional:
    def __init__(self, phis, tags):
        self.phis = phis
        self.tags = tags  # local tag -> global functional index
        self.mode = _mode_of_phis(phis)

    def __call__(self, sub: SubWord):
        local = {t: i + 1 for i, t in enumerate(self.tags)}
        word = merge_adjacent([Letter(local[l.tag], l.element) for l in sub.letters])
        return free_product_recursion([self.phis[t - 1] for t in self.tags], word)


def regroup(word: Sequence[Letter], groups: Sequence[Sequence[int]]) -> list[Letter]:
    """Rewrite a word over copies 1..n as a word over grouped copies."""
    owner = {t: gi + 1 for gi, g in enumerate(groups) for t in g}
    out: list[Letter] = []
    for l in word:
        gt = owner[l.tag]
        if out and out[-1].tag == gt:
            out[-1] = Letter(gt, out[-1].element * SubWord([l]))
        else:
            out.append(Letter(gt, SubWord([l])))
    return out


@dataclass
class AxiomReport:
    counts: dict
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def check_up_axioms(phi1, phi2, phi3, samples: Sequence[Sequence[Letter]], substitution=None) -> AxiomReport:
    """Check restriction, associativity, functoriality and two-letter factorisation.

    ``samples`` are words over copies 1..3.  ``substitution`` maps an element to
    its image under a homomorphism of the copy algebra (identity if omitted).
    """
    phis = [phi1, phi2, phi3]
    fp = free_product_recursion
    counts = {"UP1": 0, "UP2": 0, "UP3": 0, "UP4": 0}
    failures: list = []
    for w in samples:
        w = merge_adjacent(w)
        flat = fp(phis, w)
        # UP1: restriction to one copy
        for l in w:
            counts["UP1"] += 1
            if fp(phis, [l]) != phis[l.tag - 1](l.element):
                failures.append(("UP1", [l]))
        # UP2: associativity by regrouping
        left = regroup(w, [(1, 2), (3,)])
        right = regroup(w, [(1,), (2, 3)])
        lv = fp([_GroupedFunctional(phis, (1, 2)), _GroupedFunctional(phis, (3,))], left)
        rv = fp([_GroupedFunctional(phis, (1,)), _GroupedFunctional(phis, (2, 3))], right)
        counts["UP2"] += 1
        if not (lv == rv == flat):
            failures.append(("UP2", w))
        # UP3: functoriality under a homomorphism applied copy-wise
        if substitution is not None:
            pulled = [
                Functional(p.algebra, lambda m, p=p: p(substitution(NCPoly.monomial(m, 1, p.algebra))), mode=p.mode)
                for p in phis
            ]
            image = merge_adjacent([Letter(l.tag, substitution(l.element)) for l in w])
            counts["UP3"] += 1
            if fp(pulled, w) != fp(phis, image):
                failures.append(("UP3", w))
        # UP4: two letters from different copies commute and factorise
        if len(w) == 2:
            a, b = w
            counts["UP4"] += 1
            prod = phis[a.tag - 1](a.element) * phis[b.tag - 1](b.element)
            if not (fp(phis, [a, b]) == fp(phis, [b, a]) == prod):
                failures.append(("UP4", w))
    return AxiomReport(counts, failures)


# ----------------------------------------------------------------------------
# normed-algebra bounds


def _norm(x) -> float:
    if isinstance(x, np.ndarray):
        return float(np.linalg.norm(x, 2)) if x.ndim == 2 else float(np.linalg.norm(x))
    return abs(complex(x))


def behii_rhs(span, C) -> float:
    span, C = float(span), float(C)
    return 0.5 * span**2 * C**2 * math.exp(C * span)


def behII_bound(a: Sequence, times: Partition, C, norm: Callable = _norm, slack: float = 1e-12):
    """Second-order remainder of ``∏(1 + a_i)`` against its closed-form bound.

    Returns ``(lhs, rhs, holds)``.  Raises ``ValueError`` naming the first index
    whose norm exceeds ``(s_{i+1} - s_i) C``.
    """
    if len(a) != times.n:
        raise ValueError(f"{len(a)} elements for a partition with {times.n} pieces")
    C = float(C)
    for i, (ai, (s0, s1)) in enumerate(zip(a, times.pieces())):
        if norm(ai) > float(s1 - s0) * C * (1 + slack) + slack:
            raise ValueError(f"norm hypothesis violated at index {i}: {norm(ai)} > {float(s1 - s0) * C}")
    if isinstance(a[0], np.ndarray):
        one = np.eye(a[0].shape[0], dtype=complex)
    else:
        one = 1
    prod = one
    for ai in a:
        prod = prod @ (one + ai) if isinstance(ai, np.ndarray) else prod * (one + ai)
    lhs = norm(prod - one - sum(a))
    rhs = behii_rhs(times.S - times.R, C)
    return lhs, rhs, lhs <= rhs


@dataclass
class CauchyCheck:
    deviation: float
    bound: float
    holds: bool
    C: float
    condition_norm_ok: bool
    condition_additive_ok: bool
    violations: list


def net_product(family: Callable, alpha: Partition, one):
    out = one
    for r, s in alpha.pieces():
        g = one + family(r, s)
        out = out @ g if isinstance(g, np.ndarray) else out * g
    return out


def cauchy_net_bound_check(
    family: Callable,
    gamma: Partition,
    alpha: Partition,
    C=None,
    norm: Callable = _norm,
    one=None,
    tol: float = 1e-12,
) -> CauchyCheck:
    """Compare ``‖Θ_α − Θ_γ‖`` for a refinement ``α ≥ γ`` with the net bound.

    The norm and additivity conditions are checked on the pieces involved and
    reported; the comparison runs either way.
    """
    if not alpha.refines(gamma):
        raise ValueError("alpha must refine gamma")
    violations: list = []
    pieces = gamma.pieces() + [p for p in alpha.pieces() if p not in gamma.pieces()]
    ratios = {p: norm(family(*p)) / float(p[1] - p[0]) for p in pieces}
    if C is None:
        C = max(ratios.values())
    C = float(C)
    norm_ok = True
    for p, ratio in ratios.items():
        if ratio > C * (1 + tol) + tol:
            norm_ok = False
            violations.append(("norm", p, ratio))
    add_ok = True
    for r, s in gamma.pieces():
        inner = alpha.restrict(r, s).pieces()
        total = sum(family(a, b) for a, b in inner)
        dev = norm(family(r, s) - total)
        if dev > tol * max(1.0, norm(family(r, s))):
            add_ok = False
            violations.append(("additive", (r, s), dev))
    if one is None:
        sample = family(*gamma.pieces()[0])
        one = np.eye(sample.shape[0], dtype=complex) if isinstance(sample, np.ndarray) else 1
    deviation = norm(net_product(family, alpha, one) - net_product(family, gamma, one))
    span = float(gamma.S - gamma.R)
    bound = 0.5 * float(gamma.mesh) * C**2 * math.exp(C * span) * span
    return CauchyCheck(deviation, bound, deviation <= bound * (1 + tol) + tol, C, norm_ok, add_ok, violations)
