"""Seeded randomized property suites shared by the command line and the test-suite."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .functionals import (
    Letter,
    Partition,
    behII_bound,
    cauchy_net_bound_check,
    check_up_axioms,
    free_product_centering,
    free_product_cumulants,
    free_product_recursion,
    random_functional,
)
from .ncalg import KD, NCPoly, TensorAlgebra, antipode, apply_hom, canonical_retag, coproduct


@dataclass
class SuiteResult:
    name: str
    checked: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def random_element(dsg, rng: random.Random, max_degree: int = 2) -> NCPoly:
    gens = dsg.generators()
    m = tuple(rng.choice(gens) for _ in range(rng.randint(1, max_degree)))
    return NCPoly.monomial(m, 1, dsg)


def random_poly(dsg, rng: random.Random, max_degree: int = 3, terms: int = 3) -> NCPoly:
    p = NCPoly.zero(dsg)
    for _ in range(terms):
        c = Fraction(rng.randint(-4, 4), rng.randint(1, 4))
        k = rng.randint(0, max_degree)
        p = p + NCPoly.monomial(tuple(rng.choice(dsg.generators()) for _ in range(k)), c, dsg)
    return p


def random_alternating_word(dsg, rng: random.Random, copies: int, max_len: int = 5) -> list[Letter]:
    word: list[Letter] = []
    for _ in range(rng.randint(1, max_len)):
        tags = [t for t in range(1, copies + 1) if not word or t != word[-1].tag]
        word.append(Letter(rng.choice(tags), random_element(dsg, rng)))
    return word


def free_product_oracle_suite(n_words: int = 200, max_len: int = 5, seed: int = 0) -> SuiteResult:
    """Subset recursion against the centering expansion, exactly, on random words."""
    rng = random.Random(seed)
    res = SuiteResult("free-product oracle equivalence", 0)
    for d in (1, 2):
        dsg = KD(d)
        for trial in range(n_words // 2):
            phis = [random_functional(dsg, f"{seed}/{d}/{trial}/{i}") for i in range(3)]
            w = random_alternating_word(dsg, rng, 3, max_len)
            a, b = free_product_recursion(phis, w), free_product_centering(phis, w)
            res.checked += 1
            if a != b:
                res.failures.append((d, [(l.tag, str(l.element)) for l in w], str(a), str(b)))
    return res


def cumulant_oracle_suite(n_words: int = 100, max_len: int = 6, seed: int = 0) -> SuiteResult:
    """Subset recursion against the free-cumulant sum over non-crossing partitions."""
    rng = random.Random(seed)
    res = SuiteResult("free-cumulant oracle equivalence", 0)
    dsg = KD(1)
    for trial in range(n_words):
        phis = [random_functional(dsg, f"c{seed}/{trial}/{i}") for i in range(3)]
        w = random_alternating_word(dsg, rng, 3, max_len)
        a, b = free_product_recursion(phis, w), free_product_cumulants(phis, w)
        res.checked += 1
        if a != b:
            res.failures.append(([(l.tag, str(l.element)) for l in w], str(a), str(b)))
    return res


def up_axiom_suite(n_words: int = 100, seed: int = 0) -> SuiteResult:
    """Restriction, associativity, functoriality and factorisation on random three-copy words."""
    rng = random.Random(seed)
    dsg = KD(1)
    phis = [random_functional(dsg, f"up{seed}/{i}") for i in range(3)]
    samples = [random_alternating_word(dsg, rng, 3, 5) for _ in range(n_words)]
    # two-letter words from every ordered pair of distinct copies
    samples += [[Letter(s, random_element(dsg, rng)), Letter(t, random_element(dsg, rng))]
                for s in (1, 2, 3) for t in (1, 2, 3) if s != t]
    report = check_up_axioms(*phis, samples, substitution=lambda e: antipode(dsg, e))
    return SuiteResult("UP axioms", sum(report.counts.values()), list(report.failures))


def coassociativity_suite(n_polys: int = 50, seed: int = 0) -> SuiteResult:
    """Coassociativity and counit laws on generators and random polynomials."""
    rng = random.Random(seed)
    res = SuiteResult("coassociativity", 0)
    for dsg in (KD(1), KD(2), TensorAlgebra(2)):
        samples = [NCPoly.monomial((g,), 1, dsg) for g in dsg.generators()]
        samples += [random_poly(dsg, rng) for _ in range(n_polys)]
        for b in samples:
            once = coproduct(dsg, b)
            left = apply_hom(once, {1: lambda g: coproduct(dsg, NCPoly.monomial((g,), 1, dsg)),
                                    2: lambda g: NCPoly.monomial((g.with_tag(3),), 1, dsg)})
            right = apply_hom(once, {1: lambda g: NCPoly.monomial((g,), 1, dsg),
                                     2: lambda g: coproduct(dsg, NCPoly.monomial((g,), 1, dsg)).retag(lambda t: t + 1)})
            counit_left = apply_hom(once, {1: lambda g: NCPoly.scalar(dsg.counit_gen(g), dsg),
                                           2: lambda g: NCPoly.monomial((g,), 1, dsg)})
            counit_right = apply_hom(once, {1: lambda g: NCPoly.monomial((g,), 1, dsg),
                                            2: lambda g: NCPoly.scalar(dsg.counit_gen(g), dsg)})
            res.checked += 1
            if canonical_retag(left) != canonical_retag(right) or left != right:
                res.failures.append(("coassociativity", str(dsg), str(b)))
            if not (counit_left == b == counit_right):
                res.failures.append(("counit", str(dsg), str(b)))
    return res


def _random_partition(rng: random.Random, R, S, n: int) -> Partition:
    R, S = Fraction(R), Fraction(S)
    inner = set()
    while len(inner) < n - 1:
        inner.add(R + (S - R) * Fraction(rng.randint(1, 999), 1000))
    return Partition((R,) + tuple(sorted(inner)) + (S,))


def _random_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def product_bound_suite(n_instances: int = 1000, seed: int = 0) -> SuiteResult:
    """Second-order remainder bound of ``∏(1 + a_i)`` on random admissible matrices."""
    rng = random.Random(seed)
    nrng = np.random.default_rng(seed)
    res = SuiteResult("second-order product bound", 0)
    for _ in range(n_instances):
        dim, n = rng.randint(1, 8), rng.randint(1, 10)
        span = Fraction(rng.randint(1, 8), 4)
        times = _random_partition(rng, 0, span, n)
        C = rng.uniform(0.1, 3.0)
        a = []
        for s0, s1 in times.pieces():
            M = _random_matrix(nrng, dim)
            M *= float(s1 - s0) * C * rng.uniform(0, 1) / np.linalg.norm(M, 2)
            a.append(M)
        lhs, rhs, holds = behII_bound(a, times, C)
        res.checked += 1
        if not holds:
            res.failures.append((dim, n, float(span), C, lhs, rhs))
    return res


def net_bound_suite(n_pairs: int = 100, seed: int = 0) -> SuiteResult:
    """Refinement deviation of linear families ``(s − r) M`` against the net bound."""
    rng = random.Random(seed)
    nrng = np.random.default_rng(seed)
    res = SuiteResult("refinement net bound", 0)
    for _ in range(n_pairs):
        dim = rng.randint(1, 6)
        M = _random_matrix(nrng, dim) * rng.uniform(0.1, 1.5)
        S = Fraction(rng.randint(1, 8), 4)
        gamma = _random_partition(rng, 0, S, rng.randint(1, 5))
        extra = _random_partition(rng, 0, S, rng.randint(2, 12))
        alpha = gamma | extra
        C = float(np.linalg.norm(M, 2))
        check = cauchy_net_bound_check(lambda r, s: float(s - r) * M, gamma, alpha, C=C)
        res.checked += 1
        if not (check.holds and check.condition_norm_ok and check.condition_additive_ok):
            res.failures.append((dim, float(S), check.deviation, check.bound, check.violations))
    return res


SELFTEST_SUITES = {
    "free-product oracle equivalence": free_product_oracle_suite,
    "free-cumulant oracle equivalence": cumulant_oracle_suite,
    "UP axioms": up_axiom_suite,
    "coassociativity": coassociativity_suite,
    "second-order product bound": product_bound_suite,
    "refinement net bound": net_bound_suite,
}
