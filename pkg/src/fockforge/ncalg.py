"""Free *-algebras with tagged generators and the dual semigroups K<d> and T(V).

Elements of K<d> are stored as representatives in the free algebra C<d>; no
normal form modulo the unitarity relations is attempted.  Maps that should
respect the relations are checked by evaluating them on :func:`kd_relations`.

Generator indices are 1-based, matching the usual ``x_{kl}`` notation.  A copy
tag ``i`` marks which factor of an n-fold free product a letter lives in.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

from .scalars import EXACT, FLOAT, GaussianRational, ScalarModeError, exact, mode_of

UNITARY = "x"
TENSOR = "v"


class GeneratorSymbol(NamedTuple):
    """A letter ``x_{row,col}`` (unitary group) or ``v_row`` (tensor basis).

    Tuple order gives the generator order (kind, row, col, starred, tag).
    """

    kind: str
    row: int
    col: int
    starred: bool = False
    tag: int = 1

    def star(self) -> GeneratorSymbol:
        return self._replace(starred=not self.starred)

    def with_tag(self, tag: int) -> GeneratorSymbol:
        return self._replace(tag=tag)

    def __str__(self) -> str:
        base = "x" if self.kind == UNITARY else "v"
        idx = f"{self.row}{self.col}" if self.kind == UNITARY else f"{self.row}"
        s = f"{base}{'*' if self.starred else ''}{idx}"
        return s if self.tag == 1 else f"{s}^({self.tag})"


Monomial = tuple  # tuple[GeneratorSymbol, ...]; () is the unit


def mono_star(m: Monomial) -> Monomial:
    return tuple(g.star() for g in reversed(m))


def mono_key(m: Monomial):
    return (len(m), m)


def mono_str(m: Monomial) -> str:
    return "1" if not m else "".join(str(g) for g in m)


def _zero_like(mode: str):
    return exact(0) if mode == EXACT else 0j


def _one_like(mode: str):
    return exact(1) if mode == EXACT else 1 + 0j


def _as_mode(c, mode: str):
    if mode == EXACT:
        if isinstance(c, (float, complex)):
            raise ScalarModeError(f"float coefficient {c!r} in an exact-mode polynomial")
        return c if isinstance(c, GaussianRational) else exact(c)
    if isinstance(c, GaussianRational):
        raise ScalarModeError(f"exact coefficient {c!r} in a float-mode polynomial")
    return complex(c)


class NCPoly:
    """A noncommutative *-polynomial: finite map monomial -> coefficient.

    Zero coefficients are never stored, so two polynomials over the same
    algebra are equal exactly when their term maps are equal.
    """

    __slots__ = ("terms", "algebra", "mode", "_hash")

    def __init__(self, terms: Mapping = (), algebra=None, mode: str = EXACT):
        clean = {}
        for m, c in dict(terms).items():
            c = _as_mode(c, mode)
            if c:
                clean[tuple(m)] = c
        self.terms = clean
        self.algebra = algebra
        self.mode = mode
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, algebra, mode: str) -> NCPoly:
        obj = object.__new__(cls)
        obj.terms = terms
        obj.algebra = algebra
        obj.mode = mode
        obj._hash = None
        return obj

    # construction helpers
    @classmethod
    def one(cls, algebra=None, mode: str = EXACT) -> NCPoly:
        return cls({(): 1}, algebra, mode)

    @classmethod
    def zero(cls, algebra=None, mode: str = EXACT) -> NCPoly:
        return cls({}, algebra, mode)

    @classmethod
    def scalar(cls, c, algebra=None, mode: str = EXACT) -> NCPoly:
        return cls({(): c}, algebra, mode)

    @classmethod
    def monomial(cls, m: Iterable[GeneratorSymbol], c=1, algebra=None, mode: str = EXACT) -> NCPoly:
        return cls({tuple(m): c}, algebra, mode)

    # inspection
    def items(self):
        """Terms in canonical (length-lexicographic) order."""
        return sorted(self.terms.items(), key=lambda kv: mono_key(kv[0]))

    def monomials(self):
        return [m for m, _ in self.items()]

    def coeff(self, m: Monomial):
        return self.terms.get(tuple(m), _zero_like(self.mode))

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def tags(self) -> set:
        return {g.tag for m in self.terms for g in m}

    def is_zero(self) -> bool:
        return not self.terms

    def scalar_part(self):
        return self.coeff(())

    # arithmetic
    def _check(self, other: NCPoly):
        if self.mode != other.mode:
            raise ScalarModeError(f"mixing {self.mode} and {other.mode} polynomials")
        if self.algebra is not None and other.algebra is not None and self.algebra != other.algebra:
            raise ValueError(f"algebra mismatch: {self.algebra} vs {other.algebra}")
        return self.algebra if self.algebra is not None else other.algebra

    def _lift(self, other) -> NCPoly:
        if isinstance(other, NCPoly):
            return other
        return NCPoly.scalar(other, self.algebra, self.mode)

    def __add__(self, other) -> NCPoly:
        other = self._lift(other)
        alg = self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            v = c if v is None else v + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return NCPoly._raw(out, alg, self.mode)

    __radd__ = __add__

    def __neg__(self) -> NCPoly:
        return NCPoly._raw({m: -c for m, c in self.terms.items()}, self.algebra, self.mode)

    def __sub__(self, other) -> NCPoly:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> NCPoly:
        return self._lift(other) - self

    def __mul__(self, other) -> NCPoly:
        if not isinstance(other, NCPoly):
            c = _as_mode(other, self.mode)
            if not c:
                return NCPoly._raw({}, self.algebra, self.mode)
            return NCPoly._raw({m: v * c for m, v in self.terms.items()}, self.algebra, self.mode)
        alg = self._check(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 + m2
                v = out.get(m)
                v = c1 * c2 if v is None else v + c1 * c2
                out[m] = v
        return NCPoly._raw({m: c for m, c in out.items() if c}, alg, self.mode)

    def __rmul__(self, other) -> NCPoly:
        return self * other

    def __pow__(self, n: int) -> NCPoly:
        return reduce(lambda a, b: a * b, [self] * n, NCPoly.one(self.algebra, self.mode))

    def star(self) -> NCPoly:
        return NCPoly._raw(
            {mono_star(m): c.conjugate() for m, c in self.terms.items()}, self.algebra, self.mode
        )

    def map_coefficients(self, fn: Callable, mode: str | None = None) -> NCPoly:
        mode = mode or self.mode
        return NCPoly({m: fn(c) for m, c in self.terms.items()}, self.algebra, mode)

    def to_float(self) -> NCPoly:
        return self.map_coefficients(complex, FLOAT)

    def retag(self, mapping: Mapping[int, int] | Callable[[int], int]) -> NCPoly:
        f = mapping if callable(mapping) else mapping.__getitem__
        out: dict = {}
        for m, c in self.terms.items():
            key = tuple(g.with_tag(f(g.tag)) for g in m)
            out[key] = out.get(key, _zero_like(self.mode)) + c
        return NCPoly._raw({k: v for k, v in out.items() if v}, self.algebra, self.mode)

    def untagged(self) -> NCPoly:
        return self.retag(lambda _t: 1)

    # comparison
    def __eq__(self, other) -> bool:
        if not isinstance(other, NCPoly):
            if isinstance(other, (int, GaussianRational, complex, float)):
                return self == self._lift(other)
            return NotImplemented
        return self.mode == other.mode and self.terms == other.terms and (
            self.algebra is None or other.algebra is None or self.algebra == other.algebra
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"NCPoly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.items():
            parts.append(mono_str(m) if c == 1 else f"({c})*{mono_str(m)}" if m else f"({c})")
        return " + ".join(parts)


def canonical_retag(p: NCPoly) -> NCPoly:
    """Renumber copy tags 1, 2, ... in order of first occurrence.

    Occurrence order follows the canonical term order, so coassociativity can
    be checked by structural equality.
    """
    order: dict[int, int] = {}
    for m, _ in p.items():
        for g in m:
            if g.tag not in order:
                order[g.tag] = len(order) + 1
    return p.retag(lambda t: order.get(t, t))


# ----------------------------------------------------------------------------
# dual semigroups


@dataclass(frozen=True)
class DualSemigroup:
    """Base class; subclasses fix the generators, coproduct, counit and antipode."""

    def generators(self) -> list[GeneratorSymbol]:
        raise NotImplementedError

    def coproduct_gen(self, g: GeneratorSymbol) -> NCPoly:
        raise NotImplementedError

    def counit_gen(self, g: GeneratorSymbol):
        raise NotImplementedError

    def antipode_gen(self, g: GeneratorSymbol) -> NCPoly:
        raise NotImplementedError

    def chain(self, g: GeneratorSymbol):
        """Transfer-matrix form of the iterated coproduct of one letter.

        Returns ``(size, start, end, reverse, entry)`` such that the n-fold
        coproduct equals the ``(start, end)`` entry of the product over copies
        ``1..n`` (reversed when ``reverse``) of the matrices whose ``(a, b)``
        entry is ``entry(a, b)``: a :class:`GeneratorSymbol` (to be tagged by
        the copy) or a plain scalar.
        """
        raise NotImplementedError

    def poly(self, g: GeneratorSymbol, mode: str = EXACT) -> NCPoly:
        return NCPoly.monomial((g,), 1, self, mode)

    def one(self, mode: str = EXACT) -> NCPoly:
        return NCPoly.one(self, mode)


@dataclass(frozen=True)
class KD(DualSemigroup):
    """The noncommutative unitary group K<d>."""

    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be positive")

    def sym(self, k: int, l: int, starred: bool = False, tag: int = 1) -> GeneratorSymbol:
        if not (1 <= k <= self.d and 1 <= l <= self.d):
            raise ValueError(f"index ({k},{l}) out of range for d={self.d}")
        return GeneratorSymbol(UNITARY, k, l, starred, tag)

    def x(self, k: int, l: int, mode: str = EXACT) -> NCPoly:
        return self.poly(self.sym(k, l), mode)

    def xs(self, k: int, l: int, mode: str = EXACT) -> NCPoly:
        return self.poly(self.sym(k, l, True), mode)

    def generators(self):
        return [self.sym(k, l, s) for s in (False, True) for k in range(1, self.d + 1) for l in range(1, self.d + 1)]

    def coproduct_gen(self, g):
        k, l = g.row, g.col
        terms = {}
        for p in range(1, self.d + 1):
            a = GeneratorSymbol(UNITARY, k, p, False, 1)
            b = GeneratorSymbol(UNITARY, p, l, False, 2)
            terms[(a, b)] = 1
        out = NCPoly(terms, self)
        return out.star() if g.starred else out

    def counit_gen(self, g):
        return exact(1) if g.row == g.col else exact(0)

    def antipode_gen(self, g):
        # S'(x_kl) = x*_lk, extended as a *-homomorphism
        return self.poly(GeneratorSymbol(UNITARY, g.col, g.row, not g.starred))

    def chain(self, g):
        if not g.starred:
            return self.d, g.row - 1, g.col - 1, False, lambda a, b: GeneratorSymbol(UNITARY, a + 1, b + 1)
        return self.d, g.col - 1, g.row - 1, True, lambda a, b: GeneratorSymbol(UNITARY, b + 1, a + 1, True)

    def __str__(self) -> str:
        return f"K<{self.d}>"


@dataclass(frozen=True)
class TensorAlgebra(DualSemigroup):
    """T(V) for V spanned by ``v_i`` and ``v_i*``, i = 1..dim, with the primitive coproduct."""

    dim: int

    def sym(self, i: int, starred: bool = False, tag: int = 1) -> GeneratorSymbol:
        if not 1 <= i <= self.dim:
            raise ValueError(f"basis index {i} out of range")
        return GeneratorSymbol(TENSOR, i, 0, starred, tag)

    def v(self, i: int, starred: bool = False, mode: str = EXACT) -> NCPoly:
        return self.poly(self.sym(i, starred), mode)

    def generators(self):
        return [self.sym(i, s) for s in (False, True) for i in range(1, self.dim + 1)]

    def coproduct_gen(self, g):
        return NCPoly({(g.with_tag(1),): 1, (g.with_tag(2),): 1}, self)

    def counit_gen(self, g):
        return exact(0)

    def antipode_gen(self, g):
        return NCPoly({(g.with_tag(1),): -1}, self)

    def chain(self, g):
        base = g.with_tag(1)

        def entry(a, b):
            if a == b:
                return 1
            return base if (a, b) == (0, 1) else 0

        return 2, 0, 1, False, entry

    def __str__(self) -> str:
        return f"T(V{self.dim})"


# ----------------------------------------------------------------------------
# operations


def mul(p: NCPoly, q: NCPoly) -> NCPoly:
    return p * q


def star(p: NCPoly) -> NCPoly:
    return p.star()


def apply_hom(p: NCPoly, images: Mapping[int, Callable[[GeneratorSymbol], NCPoly]], algebra=None) -> NCPoly:
    """Apply the unital homomorphism routing tag ``i`` letters through ``images[i]``.

    Each image callable receives the letter with its tag reset to 1.
    """
    algebra = algebra if algebra is not None else p.algebra
    one = NCPoly.one(algebra, p.mode)
    total = NCPoly.zero(algebra, p.mode)
    cache: dict = {}
    for m, c in p.terms.items():
        term = one
        for g in m:
            img = cache.get(g)
            if img is None:
                img = images[g.tag](g.with_tag(1))
                cache[g] = img
            term = term * img
        total = total + term * c
    return total


def coproduct(dsg: DualSemigroup, b: NCPoly) -> NCPoly:
    """Homomorphic extension of the generator coproduct; result carries tags 1, 2."""
    return apply_hom(b, {1: lambda g: _coproduct_gen(dsg, g, b.mode)}, dsg)


@lru_cache(maxsize=None)
def _coproduct_gen_exact(dsg: DualSemigroup, g: GeneratorSymbol) -> NCPoly:
    return dsg.coproduct_gen(g)


def _coproduct_gen(dsg, g, mode):
    p = _coproduct_gen_exact(dsg, g)
    return p if mode == EXACT else p.to_float()


@lru_cache(maxsize=None)
def _coproduct_n_gen(dsg: DualSemigroup, g: GeneratorSymbol, n: int) -> NCPoly:
    if n == 2:
        return _coproduct_gen_exact(dsg, g)
    inner = lambda h: _coproduct_n_gen(dsg, h, n - 1)  # noqa: E731
    last = lambda h: NCPoly.monomial((h.with_tag(n),), 1, dsg)  # noqa: E731
    return apply_hom(_coproduct_gen_exact(dsg, g), {1: inner, 2: last}, dsg)


def coproduct_n(dsg: DualSemigroup, b: NCPoly, n: int) -> NCPoly:
    """Iterated coproduct with Delta_2 = Delta, Delta_{n+1} = (Delta_n ⊔ id) o Delta."""
    if n < 2:
        raise ValueError("n must be at least 2")

    def img(g):
        p = _coproduct_n_gen(dsg, g, n)
        return p if b.mode == EXACT else p.to_float()

    return apply_hom(b, {1: img}, dsg)


def counit(dsg: DualSemigroup, b: NCPoly):
    if any(g.tag != 1 for m in b.terms for g in m):
        raise ValueError("counit expects an untagged polynomial")
    total = exact(0) if b.mode == EXACT else 0j
    for m, c in b.terms.items():
        v = c
        for g in m:
            v = v * dsg.counit_gen(g)
            if not v:
                break
        total = total + v
    return total


def antipode(dsg: DualSemigroup, b: NCPoly) -> NCPoly:
    def img(g):
        p = dsg.antipode_gen(g)
        return p if b.mode == EXACT else p.to_float()

    return apply_hom(b, {1: img}, dsg)


def identity_image(dsg: DualSemigroup, tag: int = 1, mode: str = EXACT):
    return lambda g: NCPoly.monomial((g.with_tag(tag),), 1, dsg, mode)


def kd_relations(d: int, mode: str = EXACT) -> list[NCPoly]:
    """The 2d^2 unitarity relations (XX* - E)_{kl} followed by (X*X - E)_{kl}."""
    alg = KD(d)
    rels = []
    for k in range(1, d + 1):
        for l in range(1, d + 1):
            p = NCPoly.zero(alg, mode)
            for q in range(1, d + 1):
                p = p + alg.x(k, q, mode) * alg.xs(l, q, mode)
            rels.append(p - (1 if k == l else 0))
    for k in range(1, d + 1):
        for l in range(1, d + 1):
            p = NCPoly.zero(alg, mode)
            for q in range(1, d + 1):
                p = p + alg.xs(q, k, mode) * alg.x(q, l, mode)
            rels.append(p - (1 if k == l else 0))
    return rels


def substitute_hom(
    p: NCPoly,
    images: Sequence[Mapping | Callable],
    one=1,
    mul: Callable = lambda a, b: a * b,
):
    """Evaluate ``(h_1 ⊔ ... ⊔ h_n)(p)`` in a target algebra.

    ``images[i-1]`` maps untagged generator symbols of copy ``i`` to target
    elements (a mapping or a callable).  The target must support addition,
    ``mul`` and multiplication by scalars; ``one`` is its unit.
    """
    cache: dict = {}

    def image(g: GeneratorSymbol):
        if g in cache:
            return cache[g]
        if not 1 <= g.tag <= len(images):
            raise ValueError(f"no image supplied for copy tag {g.tag}")
        h = images[g.tag - 1]
        key = g.with_tag(1)
        try:
            val = h(key) if callable(h) else h[key]
        except KeyError:
            raise ValueError(f"missing generator image for {key}") from None
        cache[g] = val
        return val

    total = None
    for m, c in p.items():
        term = one
        for g in m:
            term = mul(term, image(g))
        term = term * c if not m else term * c
        total = term if total is None else total + term
    if total is None:
        return one * 0
    return total


def chain_expand(dsg: DualSemigroup, g: GeneratorSymbol, n: int, mode: str = EXACT) -> NCPoly:
    """Expand the transfer-matrix form of Delta_n(g) symbolically (for testing)."""
    size, start, end, reverse, entry = dsg.chain(g)
    tags = range(n, 0, -1) if reverse else range(1, n + 1)
    one = NCPoly.one(dsg, mode)
    zero = NCPoly.zero(dsg, mode)
    row = [one if a == start else zero for a in range(size)]
    for t in tags:
        new = []
        for b in range(size):
            acc = zero
            for a in range(size):
                e = entry(a, b)
                if isinstance(e, GeneratorSymbol):
                    acc = acc + row[a] * NCPoly.monomial((e.with_tag(t),), 1, dsg, mode)
                elif e:
                    acc = acc + row[a] * e
            new.append(acc)
        row = new
    return row[end]


def all_monomials(dsg: DualSemigroup, max_degree: int, min_degree: int = 0) -> list[Monomial]:
    gens = dsg.generators()
    out = []
    for k in range(min_degree, max_degree + 1):
        out.extend(itertools.product(gens, repeat=k))
    return out


def reduce_by_relations(p: NCPoly, relations: Sequence[NCPoly], max_degree: int | None = None) -> NCPoly:
    """Reduce ``p`` modulo the linear span of ``u r w`` (r a relation, degree ≤ bound).

    This is plain Gaussian elimination on a degree-truncated spanning set with
    leading monomials taken in length-lexicographic order; it is not a normal
    form in the quotient algebra.
    """
    if p.mode != EXACT:
        raise ScalarModeError("relation reduction is exact-mode only")
    alg = p.algebra
    bound = p.degree() if max_degree is None else max_degree
    gens = alg.generators() if alg is not None else []
    spanning = []
    for r in relations:
        slack = bound - r.degree()
        if slack < 0:
            continue
        for lu in range(slack + 1):
            for lw in range(slack - lu + 1):
                for u in itertools.product(gens, repeat=lu):
                    for w in itertools.product(gens, repeat=lw):
                        spanning.append(NCPoly.monomial(u, 1, alg) * r * NCPoly.monomial(w, 1, alg))
    basis = _echelon(spanning)
    out = p
    for lead, row in basis:
        c = out.terms.get(lead)
        if c:
            out = out - row * c
    return out


def _leading(p: NCPoly):
    return max(p.terms, key=mono_key)


def _echelon(polys: Sequence[NCPoly]) -> list:
    """Fully reduced echelon basis as ``(leading monomial, monic poly)`` pairs."""
    basis: list = []
    for q in polys:
        for lead, row in basis:
            c = q.terms.get(lead)
            if c:
                q = q - row * c
        if q.is_zero():
            continue
        lead = _leading(q)
        q = q * (1 / q.terms[lead])
        reduced = []
        for l2, row in basis:
            c = row.terms.get(lead)
            reduced.append((l2, row - q * c if c else row))
        basis = reduced + [(lead, q)]
        basis.sort(key=lambda lr: mono_key(lr[0]), reverse=True)
    return basis


__all__ = [
    "GeneratorSymbol",
    "Monomial",
    "NCPoly",
    "DualSemigroup",
    "KD",
    "TensorAlgebra",
    "mul",
    "star",
    "coproduct",
    "coproduct_n",
    "counit",
    "antipode",
    "kd_relations",
    "substitute_hom",
    "apply_hom",
    "canonical_retag",
    "chain_expand",
    "all_monomials",
    "reduce_by_relations",
    "mono_star",
    "mono_str",
    "mode_of",
]
