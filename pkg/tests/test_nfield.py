import random
from fractions import Fraction

import pytest

from capkernel.errors import DivisionByZero, IndexDivisor, NotPrime, ValidationError
from capkernel.nfield import (FieldAutomorphism, FieldElement, NumberField, PrimeIdeal,
                              apply_automorphism, element_arith, extend_ideal,
                              factor_ideal, factor_rational_prime, ideal_from_factorization,
                              ideal_norm_to_base, ideal_ops)

from conftest import FIXTURES, covering


@pytest.fixture(scope="module")
def Qi():
    return NumberField([1, 0, 1], name="Q(i)")


def el(field, *coords):
    return FieldElement(field, list(coords))


# -- elements -------------------------------------------------------------------

def test_conjugate_product(Qi):
    assert element_arith(el(Qi, 1, 1), el(Qi, 1, -1), "mul") == Qi.rational(2)


def test_golden_ratio_square():
    # basis {1, (1 + sqrt5)/2}; eps satisfies x^2 - x - 1
    K = NumberField([-5, 0, 1], basis=[[1, 0], [Fraction(1, 2), Fraction(1, 2)]])
    eps = el(K, 0, 1)
    assert eps * eps == eps + 1


def test_norm_and_trace(Qi):
    x = el(Qi, 2, 1)
    assert element_arith(x, None, "norm") == 5
    assert element_arith(x, None, "trace") == 4


def test_inverse(Qi):
    x = el(Qi, 2, 1)
    assert x * x.inverse() == Qi.one()
    with pytest.raises(DivisionByZero):
        Qi.zero().inverse()


def test_reducible_polynomial_rejected():
    with pytest.raises(ValidationError):
        NumberField([-1, 0, 1])


def test_wrong_discriminant_rejected():
    with pytest.raises(ValidationError):
        NumberField([1, 0, 1], claimed_discriminant=-8)


def test_non_ring_basis_rejected():
    with pytest.raises(ValidationError):
        NumberField([1, 0, 1], basis=[[1, 0], [Fraction(1, 2), Fraction(1, 2)]])


# -- automorphisms ---------------------------------------------------------------

def test_identity_automorphism(Qi):
    ident = FieldAutomorphism(Qi, Qi.theta())
    x = el(Qi, 3, -7)
    assert apply_automorphism(ident, x) == x and ident.is_identity()


def test_conjugation(Qi):
    sigma = FieldAutomorphism(Qi, el(Qi, 0, -1))
    assert apply_automorphism(sigma, el(Qi, 2, 1)) == el(Qi, 2, -1)
    assert sigma.order() == 2


def test_bad_automorphism_rejected(Qi):
    with pytest.raises(ValidationError):
        FieldAutomorphism(Qi, el(Qi, 1, 1))


def test_conjugating_sqrt5_inside_fixture_a():
    cov = covering("fixture_a")
    K = cov.K
    # theta^2 = (-3 +- sqrt5)/2, so eps = theta^2 + 2 satisfies eps^2 = eps + 1
    eps = K.from_power_basis([2, 0, 1, 0])
    assert eps * eps == eps + 1
    sigma = cov.automorphisms[1]
    assert sigma(eps) == -eps.inverse()
    assert sigma(eps) == 1 - eps


def test_automorphisms_multiplicative_on_fixtures():
    rng = random.Random(5)
    for name in FIXTURES:
        cov = covering(name)
        K = cov.K
        for s in cov.automorphisms:
            assert cov.n % s.order() == 0
            power = s
            for _ in range(cov.n - 1):
                power = power.compose(s)
            assert power.is_identity()
            for _ in range(100):
                a, b = K.random_element(rng, 5), K.random_element(rng, 5)
                assert s(a * b) == s(a) * s(b)


# -- ideals ---------------------------------------------------------------------

def test_unit_ideal_is_neutral(Qi):
    I = Qi.ideal([el(Qi, 3, 1), Qi.rational(10)])
    assert I * Qi.unit_ideal() == I


def test_ramified_square(Qi):
    P = Qi.principal_ideal(el(Qi, 1, 1))
    assert P * P == Qi.principal_ideal(Qi.rational(2))


def test_ideal_norm_matches_element_norm(Qi):
    assert ideal_ops(Qi.principal_ideal(el(Qi, 2, 1)), None, "norm") == 5


def test_ideal_inverse(Qi):
    P = Qi.ideal([Qi.rational(5), el(Qi, 2, 1)])
    assert (P * P.inverse()).is_unit_ideal()


def test_norm_multiplicative_random():
    rng = random.Random(9)
    for name in FIXTURES:
        K = covering(name).K
        for _ in range(10):
            I = K.ideal([K.random_element(rng, 4) for _ in range(2)])
            J = K.ideal([K.random_element(rng, 4) for _ in range(2)])
            if I.norm() == 0 or J.norm() == 0:
                continue
            assert (I * J).norm() == I.norm() * J.norm()


def test_valuation_requires_prime(Qi):
    I = Qi.principal_ideal(el(Qi, 2, 1))
    with pytest.raises(NotPrime):
        I.valuation(Qi.unit_ideal())


def test_non_prime_generator_rejected(Qi):
    with pytest.raises(NotPrime):
        PrimeIdeal(Qi, 5, Qi.rational(5), verify=True)


# -- factorization -----------------------------------------------------------------

def test_split_prime(Qi):
    fac = factor_rational_prime(Qi, 5)
    assert sorted((e, f) for _, e, f in fac) == [(1, 1), (1, 1)]
    ideals = {P for P, _, _ in fac}
    assert ideals == {Qi.ideal([Qi.rational(5), el(Qi, 2, 1)]),
                      Qi.ideal([Qi.rational(5), el(Qi, 2, -1)])}


def test_inert_prime(Qi):
    fac = factor_rational_prime(Qi, 3)
    assert [(e, f) for _, e, f in fac] == [(1, 2)]
    assert fac[0][0] == Qi.principal_ideal(Qi.rational(3))


def test_ramified_prime(Qi):
    fac = factor_rational_prime(Qi, 2)
    assert [(e, f) for _, e, f in fac] == [(2, 1)]
    assert fac[0][0] == Qi.principal_ideal(el(Qi, 1, 1))


def test_factorization_reassembles():
    for name in FIXTURES:
        K = covering(name).K
        for p in (2, 3, 5, 7, 11, 13):
            try:
                fac = factor_rational_prime(K, p)
            except IndexDivisor:
                continue
            assert sum(e * f for _, e, f in fac) == K.degree
            assert ideal_from_factorization(K, [(P, e) for P, e, _ in fac]) == \
                K.principal_ideal(K.rational(p))


def test_index_divisor_rejected():
    K = NumberField([3, 0, 1], basis=[[1, 0], [Fraction(1, 2), Fraction(1, 2)]])
    assert K.index % 2 == 0
    with pytest.raises(IndexDivisor):
        factor_rational_prime(K, 2)


def test_factor_ideal_roundtrip(Qi):
    I = Qi.principal_ideal(el(Qi, 7, 4))
    assert ideal_from_factorization(Qi, factor_ideal(I)) == I


# -- extension and relative norm ------------------------------------------------------

def test_extend_unit_ideal():
    cov = covering("fixture_a")
    assert extend_ideal(cov.embedding, cov.F.unit_ideal()) == cov.K.unit_ideal()


def test_extend_five_to_gaussian_integers():
    cov = covering("q_to_qi")
    K = cov.K
    A = extend_ideal(cov.embedding, cov.F.principal_ideal(cov.F.rational(5)))
    assert A == K.ideal([K.rational(5), el(K, 2, 1)]) * K.ideal([K.rational(5), el(K, 2, -1)])


def test_extend_nonprincipal_prime_norm():
    cov = covering("fixture_a")
    F = cov.F
    a = F.ideal([F.rational(2), F.from_power_basis([1, 1])])
    assert extend_ideal(cov.embedding, a).norm() == 4


def test_relative_norm_examples():
    cov = covering("q_to_qi")
    K = cov.K
    assert ideal_norm_to_base(cov.embedding, K.unit_ideal()) == cov.F.unit_ideal()
    N = ideal_norm_to_base(cov.embedding, K.principal_ideal(el(K, 2, 1)))
    assert N == cov.F.principal_ideal(cov.F.rational(5))


def test_relative_norm_of_extension_is_power():
    rng = random.Random(1)
    for name in FIXTURES:
        cov = covering(name)
        F = cov.F
        ideals = [P for P in cov.class_F.factor_base]
        for _ in range(3):
            x = F.random_element(rng, 3)
            if not x.is_zero():
                ideals.append(F.principal_ideal(x))
        for a in ideals:
            A = extend_ideal(cov.embedding, a)
            assert A.norm() == a.norm() ** cov.n
            assert ideal_norm_to_base(cov.embedding, A) == a ** cov.n
