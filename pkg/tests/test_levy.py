import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from fockforge.fock import GridSpec
from fockforge.ncalg import KD, NCPoly, all_monomials
from fockforge.scalars import exact
from fockforge.schurmann import SchurmannTriple, psi_extend, triple_from_matrix
from fockforge.levy import (
    LevyConfig,
    closed_form_generator_marginal,
    continuity_report,
    cyclicity_rank,
    default_samples,
    freeness_defect,
    generator_from_marginal,
    generator_report,
    increment_factorization_defect,
    marginal,
    marginal_report,
    moment_table,
    semigroup_defect,
    stationarity_defect,
    stochastically_equivalent,
    truncated_marginal,
    weak_continuity_probe,
)

K1, K2 = KD(1), KD(2)
X, XS = K1.sym(1, 1), K1.sym(1, 1, True)
L2 = ((1, Fraction(1, 2)), (Fraction(-1, 3), exact(Fraction(3, 4), 1)))
HALF = Fraction(1, 2)
TS = [Fraction(1, 2**k) for k in range(3, 7)]


def config(L, **kw):
    return LevyConfig(triple_from_matrix(L), GridSpec(1, 8, 1, 3), **kw)


ONE, ZERO, TWO = config([[1]]), config([[0]]), config(L2)


def test_marginal_of_unit_is_one():
    assert marginal(ONE, 1, NCPoly.one(K1)).value == 1
    assert marginal(ONE, 0, (X,)).value == 1


def test_scalar_marginal_is_exponential():
    est = marginal(ONE, 1, (X,))
    assert abs(est.value - math.exp(-0.5)) < ONE.tol("marginal")
    assert est.provenance == "extrapolated" and est.error > 0


def test_matrix_marginal_is_exponential_of_generator_values():
    E = closed_form_generator_marginal(TWO.triple, HALF)
    M = np.array([[complex(TWO.triple.psi_gen[K2.sym(k, l)]) for l in (1, 2)] for k in (1, 2)])
    # oracle: truncated power series of exp(M/2)
    series, term = np.eye(2, dtype=complex), np.eye(2, dtype=complex)
    for k in range(1, 30):
        term = term @ (0.5 * M) / k
        series = series + term
    assert np.allclose(E, series, atol=1e-12)
    rep = marginal_report(TWO, [HALF])
    assert rep.passed, rep.max_defect


def test_increment_factorization():
    assert increment_factorization_defect(ONE, 0, HALF, 1, [(X,), (XS,)], 3).max_defect == 0
    rep = increment_factorization_defect(ONE, 0, HALF, 1, default_samples(1, 2), 3)
    assert rep.passed
    assert increment_factorization_defect(ZERO, 0, HALF, 1, default_samples(1), 2).max_defect == 0
    assert increment_factorization_defect(TWO, 0, Fraction(1, 4), HALF, default_samples(2, 1), 2).passed


def test_two_interval_freeness_factorizes_generator_pair():
    rep = freeness_defect(ONE, [(0, HALF), (HALF, 1)], [[(0, (X,)), (1, (XS,))]], 4)
    assert rep.passed
    both = marginal(ONE, HALF, (X,), depths=[4]).value * marginal(ONE, HALF, (XS,), depths=[4]).value
    from fockforge.functionals import Partition
    from fockforge.levy import net_moment

    joint = net_moment(ONE, [((X,), Partition.dyadic(0, HALF, 4)), ((XS,), Partition.dyadic(HALF, 1, 4))])
    assert complex(joint) == pytest.approx(both, abs=1e-12)


def test_single_interval_freeness_is_exact():
    words = [[(0, m)] for m in default_samples(1)]
    assert freeness_defect(ONE, [(0, 1)], words, 3).max_defect == 0


def test_freeness_on_longer_words():
    words = [[(0, (X,)), (1, (XS,)), (0, (XS, X)), (1, (X,))], [(1, (X, X)), (0, (XS,)), (1, (XS,))]]
    rep = freeness_defect(ONE, [(0, HALF), (HALF, 1)], words, 3)
    assert rep.passed and rep.max_defect < 1e-12


def test_freeness_rejects_overlapping_intervals():
    with pytest.raises(ValueError):
        freeness_defect(ONE, [(0, 1), (HALF, 1)], [[(0, (X,))]], 2)


def test_stationarity_is_exact():
    assert stationarity_defect(ONE, Fraction(3, 8), Fraction(7, 8), default_samples(1), 3).max_defect == 0
    assert stationarity_defect(TWO, Fraction(1, 4), Fraction(3, 4), default_samples(2), 2).max_defect == 0


def test_continuity_probe():
    assert all(v == 0 for _, v in weak_continuity_probe(ONE, NCPoly.one(K1), TS))
    rows = weak_continuity_probe(ONE, (X,), TS)
    for t, v in rows:
        assert v == pytest.approx(1 - math.exp(-float(t) / 2), rel=1e-3)
    squares = [v for _, v in weak_continuity_probe(ONE, (X, X), TS)]
    assert all(b < a for a, b in zip(squares, squares[1:]))
    assert continuity_report(ONE, default_samples(1, 2), TS).passed


def test_generator_recovery():
    est = generator_from_marginal(ONE, (X,), TS)
    assert est.value == pytest.approx(-0.5, abs=1e-3)
    assert generator_from_marginal(ONE, NCPoly.one(K1), TS).value == 0
    assert abs(generator_from_marginal(ONE, (XS, X), TS).value) < 1e-3
    rep = generator_report(ONE, default_samples(1, 2), TS)
    assert rep.passed, rep.max_defect


def test_generator_schedule_must_halve():
    with pytest.raises(ValueError):
        generator_from_marginal(ONE, (X,), [Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)])


def test_generator_recovery_for_complex_entry():
    cfg = config([[exact(Fraction(1, 2), -1)]])
    for m in default_samples(1, 2):
        est = generator_from_marginal(cfg, m, TS)
        want = complex(psi_extend(cfg.triple, NCPoly.monomial(m, 1, K1)))
        assert abs(est.value - want) < 1e-3


def test_semigroup_of_marginals():
    assert semigroup_defect(ONE, Fraction(1, 4), HALF, default_samples(1)).passed
    # degree-2 words for d = 2 cost minutes in exact arithmetic
    assert semigroup_defect(TWO, Fraction(1, 4), Fraction(1, 4), default_samples(2, 1)).passed


def test_cyclicity_examples():
    cfg = LevyConfig(triple_from_matrix([[1]]), GridSpec(1, 2, 1, 2))
    assert cyclicity_rank(cfg, 1, [0], words=[()]).rank == 1
    rep = cyclicity_rank(cfg, 1, [0])
    assert (rep.rank, rep.reachable_dim) == (2, 2)
    rep = cyclicity_rank(cfg, 2, [0, 1])
    assert rep.reachable_dim == 7 and rep.full
    assert "finite" in rep.note


def test_cyclicity_degree_bound_checked():
    with pytest.raises(ValueError):
        cyclicity_rank(ONE, 4, [0])


def test_truncated_marginal_matches_exact_net():
    from fockforge.functionals import Partition
    from fockforge.levy import net_moment

    # four pieces of degree-2 words create up to four particles, so N = 4 is needed
    cfg = LevyConfig(ONE.triple, GridSpec(1, 4, 1, 4))
    for m in default_samples(1, 2):
        value, _ = truncated_marginal(cfg, 1, m, 2)
        assert value == pytest.approx(complex(net_moment(cfg, [(m, Partition.dyadic(0, 1, 2))])), abs=1e-9)


def test_stochastic_equivalence_under_phase_change():
    rotated = config([[exact(0, 1)]])
    monos = all_monomials(K1, 2)
    for m in monos:
        p = NCPoly.monomial(m, 1, K1)
        assert psi_extend(ONE.triple, p) == psi_extend(rotated.triple, p)
    intervals = [(0, HALF), (HALF, 1)]
    a, b = moment_table(ONE, monos, intervals), moment_table(rotated, monos, intervals)
    assert stochastically_equivalent(a, b, 1e-9)
    assert a.get((), (0, HALF)).value == 1
    c = moment_table(config([[2]]), monos, intervals)
    assert not stochastically_equivalent(a, c, 1e-9)


def test_config_requires_scalar_rho():
    base = triple_from_matrix([[1]])
    rho = {X: ((exact(2),),), XS: ((exact(2),),)}
    bad = SchurmannTriple(K1, 1, rho, base.eta_gen, base.psi_gen)
    with pytest.raises(ValueError):
        LevyConfig(bad, GridSpec(1, 2, 1, 2))


def test_zero_tolerance_always_fails():
    cfg = config([[1]], tolerances={"freeness": 0})
    rep = freeness_defect(cfg, [(0, 1)], [[(0, (X,))]], 2)
    assert rep.max_defect == 0 and not rep.passed


def test_unit_entry_of_moment_table_is_checked():
    from fockforge.levy import Estimate, MomentTable

    with pytest.raises(ValueError):
        MomentTable().put((), (0, 1), Estimate(cmath.exp(0.1), 0.0, "exact"))
