import itertools
import random
from math import gcd

import pytest

from capkernel.capitulation import (capitulation_kernel, descend_cocycle,
                                    kummer_cocycle, rescores_check, roots_of_unity,
                                    snake_unit, transgression_cocycle, unit_terms,
                                    verify_sequence)
from capkernel.cohom import cohomology
from capkernel.errors import ExactnessFailure
from capkernel.fgab import check_exact
from capkernel.fixtures import BuildOptions, build_covering, bundled_fixture, parse_file

from conftest import FIXTURES, covering, sequence


def profile(rep):
    return tuple(rep.terms[f"term{i}"].invariants for i in range(1, 6))


# -- enumeration oracles -------------------------------------------------------------

def unit_classes_mod_n(L, n):
    m = gcd(n, L.w)
    step = L.w // m if m else 1
    for a in range(m):
        for es in itertools.product(range(n), repeat=L.rank):
            yield L.build([a * step] + list(es))


def oracle_term_orders(cov):
    """|term1| and |Psi/(U_F U_K^n)| by brute force over coset representatives."""
    n, UF, UK = cov.n, cov.units_F, cov.units_K
    t1 = 0
    base_classes = []
    for u in unit_classes_mod_n(UF, n):
        v = cov.embedding(u)
        if UK.is_nth_power(v, n)[0]:
            t1 += 1
        base_classes.append(v)
    psi = []
    for u in unit_classes_mod_n(UK, n):
        if all(UK.is_nth_power(s(u) / u, n)[0] for s in cov.automorphisms):
            psi.append(u)
    # distinct classes of U_F in U_K / U_K^n
    reps = []
    for v in base_classes:
        if not any(UK.is_nth_power(v / r, n)[0] for r in reps):
            reps.append(v)
    return t1, len(psi) // len(reps), len(psi)


@pytest.mark.parametrize("name", FIXTURES)
def test_unit_terms_match_enumeration(name):
    cov = covering(name)
    t1, t4, psi = oracle_term_orders(cov)
    units = unit_terms(cov)
    assert units.term1.order == t1
    assert units.term4.order == t4
    assert units.psi.order == psi


# -- fixture profiles ----------------------------------------------------------------

def test_rational_base_has_trivial_kernel():
    for name in ("q_to_qi", "q_to_cubic7"):
        assert capitulation_kernel(covering(name)).kernel.is_trivial


def test_gaussian_covering_terms():
    rep = sequence("q_to_qi")
    assert profile(rep) == ((2,), (2,), (), (), (2,))
    assert rep.exact


def test_fixture_a_profile():
    rep = sequence("fixture_a")
    assert profile(rep) == ((2,), (2,), (2,), (2, 2), (2,))
    m = rep.maps
    assert m["map1"].is_isomorphism()
    assert m["map2"].is_zero()
    assert m["map3"].is_injective()
    assert not m["map4"].is_zero()
    assert rep.units["psi_is_all_units"]
    assert rep.cross_check["h1_units_order_equals_kernel_order"]


def test_fixture_a_kernel_witness():
    cov = covering("fixture_a")
    cap = capitulation_kernel(cov)
    assert cap.kernel.invariants == (2,) and cap.killed_by_n
    F, K = cov.F, cov.K
    a = F.ideal([F.rational(2), F.from_power_basis([1, 1])])
    assert cov.class_F.dlog(a) == cov.class_F.group.element(cap.generator_vectors[0])
    x = cap.witnesses[0]
    from capkernel.capitulation import ideal_from_vector
    A = cov.embedding(ideal_from_vector(cov.class_F, cap.generator_vectors[0]))
    assert K.principal_ideal(x) == A


def test_fixture_b_profile():
    rep = sequence("fixture_b")
    assert profile(rep) == ((), (), (3,), (3,), ())
    assert rep.kernel_vs_psi["applies"]
    assert rep.kernel_vs_psi["kernel_isomorphic_to_psi_quotient"]
    assert rep.kernel_vs_psi["kernel_bounded_by_unit_index"]
    assert rep.units["unit_index"] == 9


def test_trivial_cubic_profile():
    rep = sequence("q_to_cubic7")
    assert all(g.is_trivial for g in rep.terms.values()) and rep.exact


@pytest.mark.parametrize("name", FIXTURES)
def test_every_term_killed_by_n(name):
    rep = sequence(name)
    assert all(rep.torsion_ok.values())


@pytest.mark.parametrize("name", FIXTURES)
def test_exact_at_every_node(name):
    rep = sequence(name)
    assert [v.exact for v in rep.verdicts] == [True] * 4
    assert rep.failures() == []


@pytest.mark.parametrize("name", FIXTURES)
def test_sign_flip_preserves_exactness(name):
    rep = sequence(name)
    m = rep.maps
    # rep.verdicts[0] is injectivity of map1, not covered by the four maps alone
    flipped = check_exact([m["map1"], m["map2"], -m["map3"], -m["map4"]])
    assert [v.exact for v in flipped] == [v.exact for v in rep.verdicts[1:]]


@pytest.mark.parametrize("name", FIXTURES)
def test_h1_units_isomorphic_to_kernel(name):
    rep = sequence(name)
    assert rep.cross_check["h1_units_comparison_is_isomorphism"]


# -- maps on explicit elements -----------------------------------------------------

def test_kummer_cocycle_of_minus_one():
    cov = covering("fixture_a")
    mu = roots_of_unity(cov)
    H1 = cohomology(mu.module, 1)
    UK = cov.units_K
    ok, v = UK.is_nth_power(cov.K.rational(-1), 2)
    assert ok
    c = kummer_cocycle(cov, mu, v)
    # c(sigma) = sigma(v)/v = -1, the nontrivial sign
    assert cov.automorphisms[1](v) / v == cov.K.rational(-1)
    assert not H1.group.is_zero(H1.class_of(c))
    # a different root gives a cohomologous cocycle
    c2 = kummer_cocycle(cov, mu, -v)
    assert H1.class_of(c) == H1.class_of(c2)


def test_kummer_cocycle_of_base_power_is_trivial():
    cov = covering("q_to_qi")
    mu = roots_of_unity(cov)
    H1 = cohomology(mu.module, 1)
    v = cov.K.rational(-1)
    c = kummer_cocycle(cov, mu, v)
    assert c.is_zero() and H1.group.is_zero(H1.class_of(c))


def test_trivial_cocycle_descends_to_trivial_class():
    for name in FIXTURES:
        cov = covering(name)
        values = [cov.K.one()] * cov.n
        a, _ = descend_cocycle(cov, values, random.Random(0))
        assert cov.class_F.dlog(a).is_zero()


def test_snake_of_principal_class_vanishes():
    for name in ("fixture_a", "fixture_b"):
        cov = covering(name)
        units = unit_terms(cov)
        zero = [0] * len(cov.class_F.factor_base)
        u = snake_unit(cov, zero)
        q = units.UK_mod.coords(u)
        y = units.psi_embedding.lift(q)
        assert y is not None and units.term4.is_zero(y)


def test_transgression_of_base_times_power_vanishes():
    rng = random.Random(3)
    for name in FIXTURES:
        cov = covering(name)
        mu = roots_of_unity(cov)
        H2 = cohomology(mu.module, 2)
        UF, UK = cov.units_F, cov.units_K
        for _ in range(3):
            w = cov.embedding(UF.build([rng.randrange(UF.w)] +
                                       [rng.randint(-2, 2) for _ in range(UF.rank)]))
            t = UK.build([rng.randrange(UK.w)] + [rng.randint(-2, 2) for _ in range(UK.rank)])
            c = transgression_cocycle(cov, mu, w * t ** cov.n)
            assert H2.group.is_zero(H2.class_of(c))


@pytest.mark.parametrize("name", FIXTURES)
def test_norm_of_extended_classes(name):
    ok, per = rescores_check(covering(name))
    assert ok and all(per)


@pytest.mark.parametrize("name", FIXTURES)
def test_witness_rechoices_are_stable(name):
    assert all(sequence(name).fuzzing.values())


# -- failure reporting ---------------------------------------------------------------

def test_wrong_expectation_raises():
    fx = parse_file(bundled_fixture("fixture_a"))
    fx.expectations["kernel"] = [4]
    cov = build_covering(fx, BuildOptions())
    with pytest.raises(ExactnessFailure):
        verify_sequence(cov)
    rep = verify_sequence(cov, strict=False)
    assert rep.exact and "expectation kernel" in rep.failures()


def test_reports_are_reproducible():
    a = verify_sequence(covering("fixture_b"), strict=False)
    b = verify_sequence(covering("fixture_b"), strict=False)
    assert a.maps["map3"].matrix == b.maps["map3"].matrix and a.seed == b.seed
