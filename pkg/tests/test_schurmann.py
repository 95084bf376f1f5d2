import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockforge.ncalg import KD, NCPoly, TensorAlgebra, all_monomials, counit, kd_relations
from fockforge.scalars import ScalarModeError, exact
from fockforge.schurmann import (
    MINUS,
    PAPER_PLUS,
    SchurmannTriple,
    eta_extend,
    inner,
    kernel_samples,
    kernel_tensor_triple,
    psi_extend,
    tensor_triple,
    triple_from_matrix,
    validate_generator,
)
from fockforge.suites import random_poly

K1, K2 = KD(1), KD(2)
L2 = ((1, Fraction(1, 2)), (Fraction(-1, 3), exact(Fraction(3, 4), 1)))


def test_scalar_triple_values():
    t = triple_from_matrix([[1]])
    x, xs = K1.sym(1, 1), K1.sym(1, 1, True)
    assert t.eta_gen[x] == (1,) and t.eta_gen[xs] == (-1,)
    assert t.rho_gen[x] == ((1,),)
    assert t.psi_gen[x] == Fraction(-1, 2)


def test_psi_on_generator_is_forced_by_the_relation():
    # with η(x) = 1, η(x*) = −1, only Ψ(x) = −1/2 makes Ψ vanish on x*x − 1
    base = triple_from_matrix([[1]])
    x, xs = K1.sym(1, 1), K1.sym(1, 1, True)
    rel = K1.xs(1, 1) * K1.x(1, 1) - 1
    hits = []
    for num in range(-8, 9):
        c = exact(Fraction(num, 4))
        t = SchurmannTriple(K1, 1, base.rho_gen, base.eta_gen, {x: c, xs: c.conjugate()})
        if psi_extend(t, rel) == 0:
            hits.append(c)
    assert hits == [Fraction(-1, 2)]


def test_identity_matrix_triple():
    t = triple_from_matrix([[1, 0], [0, 1]])
    for k in (1, 2):
        for l in (1, 2):
            assert t.eta_gen[K2.sym(k, l)] == (1 if k == l else 0,)
            assert t.psi_gen[K2.sym(k, l)] == (Fraction(-1, 2) if k == l else 0)


def test_float_matrix_rejected():
    with pytest.raises(ScalarModeError):
        triple_from_matrix([[0.5]])


def test_eta_examples():
    t = triple_from_matrix([[1]])
    assert eta_extend(t, NCPoly.one(K1)) == (0,)
    x = K1.x(1, 1)
    assert eta_extend(t, x * x) == (2,)
    t2 = triple_from_matrix(L2)
    for k in (1, 2):
        for l in (1, 2):
            xsx = sum((K2.xs(p, k) * K2.x(p, l) for p in (1, 2)), NCPoly.zero(K2))
            assert eta_extend(t2, xsx) == (0,)


def test_psi_examples():
    t = triple_from_matrix([[1]])
    x, xs = K1.x(1, 1), K1.xs(1, 1)
    assert psi_extend(t, NCPoly.one(K1)) == 0
    assert psi_extend(t, xs * x) == 0
    assert psi_extend(t, (x - 1).star() * (x - 1)) == 1


@pytest.mark.parametrize("L", [((1,),), ((exact(2, -1),),), L2], ids=["one", "complex", "d2"])
def test_cocycle_identity_on_centred_polynomials(L):
    t = triple_from_matrix(L)
    alg = t.dsg
    monos = all_monomials(alg, 2)
    for mp in monos:
        p = NCPoly.monomial(mp, 1, alg)
        p = p - counit(alg, p)
        ep = eta_extend(t, p.star())
        for mq in monos:
            q = NCPoly.monomial(mq, 1, alg)
            q = q - counit(alg, q)
            lhs = inner(ep, eta_extend(t, q))
            assert lhs == psi_extend(t, p * q)


@pytest.mark.parametrize("L", [((1,),), ((exact(0, 1),),), L2])
def test_extensions_vanish_on_relations(L):
    t = triple_from_matrix(L)
    for rel in kd_relations(t.dsg.d):
        assert eta_extend(t, rel) == t.zero_vector()
        assert psi_extend(t, rel) == 0


def test_plus_sign_psi_does_not_vanish_on_relations():
    t = triple_from_matrix([[1]], PAPER_PLUS)
    assert psi_extend(t, K1.xs(1, 1) * K1.x(1, 1) - 1) == 2


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_psi_is_hermitian(s):
    rng = random.Random(s)
    t = triple_from_matrix(L2) if s % 2 else triple_from_matrix([[exact(1, 1)]])
    p = random_poly(t.dsg, rng, 3)
    assert psi_extend(t, p.star()) == psi_extend(t, p).conjugate()


def test_validate_single_sample():
    t = triple_from_matrix([[1]])
    b = K1.x(1, 1) - 1
    rep = validate_generator(t, [b])
    assert rep.ok and rep.gram == [[1]]
    flipped = validate_generator(t.with_sign(PAPER_PLUS), [b])
    assert not flipped.ok
    assert flipped.min_eigenvalue == pytest.approx(-1)


def test_validate_empty_sample_list():
    assert validate_generator(triple_from_matrix([[1]]), []).ok


def test_validate_rejects_samples_outside_the_kernel():
    with pytest.raises(ValueError):
        validate_generator(triple_from_matrix([[1]]), [K1.x(1, 1)])


def test_zero_matrix_passes_for_both_signs():
    for sign in (MINUS, PAPER_PLUS):
        assert validate_generator(triple_from_matrix([[0]], sign), kernel_samples(1)).ok


def _rational_matrices(count, seed=11):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        d = rng.choice((1, 2))
        L = tuple(
            tuple(exact(Fraction(rng.randint(-4, 4), rng.randint(1, 4)), Fraction(rng.randint(-2, 2), rng.randint(1, 3)))
                  for _ in range(d))
            for _ in range(d)
        )
        if any(e for row in L for e in row):
            out.append(L)
    return out


@pytest.mark.parametrize("L", _rational_matrices(6))
def test_sign_discriminator(L):
    t = triple_from_matrix(L)
    samples = kernel_samples(len(L))
    assert validate_generator(t, samples).ok
    assert not validate_generator(t.with_sign(PAPER_PLUS), samples).gram_psd_ok


def test_tensor_triple_and_kernel_map():
    t = triple_from_matrix(L2)
    tt, index = kernel_tensor_triple(t)
    assert isinstance(tt.dsg, TensorAlgebra) and tt.dsg.dim == 4
    for (k, l), i in index.items():
        assert tt.eta_gen[tt.dsg.sym(i)] == t.eta_gen[K2.sym(k, l)]
        assert tt.psi_gen[tt.dsg.sym(i)] == t.psi_gen[K2.sym(k, l)]
        assert all(v == 0 for row in tt.rho_gen[tt.dsg.sym(i)] for v in row)
    white = tensor_triple(1, 2, {(1, False): (1, 0), (1, True): (0, 1)}, {1: Fraction(-1, 3)})
    assert white.psi_gen[white.dsg.sym(1, True)] == Fraction(-1, 3)
