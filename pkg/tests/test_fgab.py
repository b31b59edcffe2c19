import itertools
import random
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from capkernel.errors import IllFormedHom, NotComposable
from capkernel.fgab import (FGAbGroup, FGAbHom, check_exact, cotorsion_comparison,
                            determinant, group_from_presentation, hom_kernel_image_cokernel,
                            induced_maps, mat_mul, mod_n, n_torsion, smith_normal_form,
                            torsion_kernel_identity)


def diag(D):
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def check_snf(M):
    U, D, V = smith_normal_form(M)
    assert mat_mul(mat_mul(U, M), V) == D
    assert abs(determinant(U)) == 1 and abs(determinant(V)) == 1
    for i, row in enumerate(D):
        for j, v in enumerate(row):
            if i != j:
                assert v == 0
    d = diag(D)
    assert all(x >= 0 for x in d)
    for a, b in zip(d, d[1:]):
        assert (a == 0 and b == 0) or (a != 0 and b % a == 0)
    return d


# -- Smith normal form -------------------------------------------------------

def test_snf_identity():
    U, D, V = smith_normal_form([[1, 0], [0, 1]])
    assert D == [[1, 0], [0, 1]] and U == D and V == D


def test_snf_small_example():
    assert diag(smith_normal_form([[2, 4], [6, 8]])[1]) == [2, 4]


def test_snf_zero_matrix():
    assert smith_normal_form([[0, 0, 0], [0, 0, 0]])[1] == [[0, 0, 0], [0, 0, 0]]


def test_snf_empty_matrix():
    U, D, V = smith_normal_form([], ncols=3)
    assert D == [] and V == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


matrices = st.integers(1, 6).flatmap(lambda m: st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-50, 50), min_size=n, max_size=n),
                       min_size=m, max_size=m)))


@settings(max_examples=1000, deadline=None)
@given(matrices)
def test_snf_random_matrices(M):
    d = check_snf(M)
    # independent oracle: sympy's invariant factors
    want = [abs(int(x)) for x in invariant_factors(Matrix(M), domain=ZZ)]
    want += [0] * (len(d) - len(want))
    assert sorted(d, key=lambda x: (x == 0, x)) == sorted(want, key=lambda x: (x == 0, x))


def _minor_gcd(M, k):
    g = 0
    rows, cols = len(M), len(M[0])
    for r in itertools.combinations(range(rows), k):
        for c in itertools.combinations(range(cols), k):
            g = gcd(g, int(Matrix([[M[i][j] for j in c] for i in r]).det()))
    return g


def test_snf_matches_determinantal_divisors():
    rng = random.Random(7)
    for _ in range(30):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        M = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
        d = check_snf(M)
        prev = 1
        for k in range(1, min(m, n) + 1):
            g = _minor_gcd(M, k)
            expect = g // prev if prev else 0
            assert d[k - 1] == expect
            prev = g if g else 0
            if not g:
                break


def test_snf_reproducible():
    M = [[4, 6, 2], [8, 10, 12]]
    assert smith_normal_form(M) == smith_normal_form(M)


# -- presentations ----------------------------------------------------------

def test_presentation_free():
    G = group_from_presentation(1, [])
    assert G.free_rank == 1 and G.invariants == ()


def test_presentation_cyclic():
    assert group_from_presentation(1, [[2]]).invariants == (2,)


def test_presentation_diagonal():
    G = group_from_presentation(2, [[2, 0], [0, 4]])
    assert G.invariants == (2, 4) and G.order == 8 and G.describe() == "Z/2 x Z/4"


def test_invariant_chain_and_order():
    G = FGAbGroup(3, [[6, 0, 0], [0, 10, 0], [0, 0, 15]])
    inv = G.invariants
    assert inv == (30, 30)
    assert all(b % a == 0 for a, b in zip(inv, inv[1:]))
    assert all(x >= 2 for x in inv)
    prod = 1
    for x in inv:
        prod *= x
    assert prod == G.order == 900


def test_empty_presentation_is_trivial():
    G = FGAbGroup(0, [])
    assert G.is_trivial and G.order == 1 and G.describe() == "0"


def test_element_equality_is_congruence():
    G = FGAbGroup(2, [[2, 0], [0, 4]])
    a, b = G.element([1, 5]), G.element([3, 1])
    assert a == b and hash(a) == hash(b)
    c = G.element([1, 1])
    assert a + c == b + c and (a - b).is_zero()


# -- homs ---------------------------------------------------------------------

def test_times_two_on_integers():
    Z = FGAbGroup(1)
    K, Im, C = hom_kernel_image_cokernel(FGAbHom(Z, Z, [[2]]))
    assert K[0].is_trivial
    assert Im[0].free_rank == 1
    assert C[0].invariants == (2,)


def test_zero_map_z4_to_z2():
    K, Im, C = hom_kernel_image_cokernel(FGAbHom.zero(FGAbGroup.cyclic(4), FGAbGroup.cyclic(2)))
    assert K[0].invariants == (4,) and C[0].invariants == (2,)


def test_reduction_z4_to_z2():
    A, B = FGAbGroup.cyclic(4), FGAbGroup.cyclic(2)
    (K, ek), _, (C, _) = hom_kernel_image_cokernel(FGAbHom(A, B, [[1]]))
    assert K.invariants == (2,) and C.is_trivial
    assert [A.reduce(ek(g)) for g in K.gens()] == [(2,)]


def test_ill_formed_hom_rejected():
    with pytest.raises(IllFormedHom):
        FGAbHom(FGAbGroup.cyclic(2), FGAbGroup.cyclic(3), [[1]])


def test_order_splits_over_kernel_and_image():
    rng = random.Random(3)
    for _ in range(50):
        psi = random_hom(rng)
        (K, _), (Im, _), _ = hom_kernel_image_cokernel(psi)
        if psi.source.is_finite:
            assert psi.source.order == K.order * Im.order


# -- torsion and cotorsion ----------------------------------------------------

def test_n_torsion_examples():
    assert n_torsion(FGAbGroup(1), 5)[0].is_trivial
    T, e = n_torsion(FGAbGroup.cyclic(6), 2)
    assert T.invariants == (2,) and FGAbGroup.cyclic(6).reduce(e(T.gens()[0])) == (3,)
    A = FGAbGroup(2, [[2, 0], [0, 4]])
    T, e = n_torsion(A, 2)
    assert T.invariants == (2, 2)
    assert A.subgroups_equal([e(g) for g in T.gens()], [(1, 0), (0, 2)])


def test_mod_n_examples():
    assert mod_n(FGAbGroup(1), 3)[0].invariants == (3,)
    assert mod_n(FGAbGroup.cyclic(2), 3)[0].is_trivial
    assert mod_n(FGAbGroup.cyclic(4), 2)[0].invariants == (2,)


def test_degenerate_n_equal_one():
    A = FGAbGroup(2, [[2, 0], [0, 4]])
    assert n_torsion(A, 1)[0].is_trivial and mod_n(A, 1)[0].is_trivial


def test_induced_maps_identity():
    A = FGAbGroup.cyclic(4)
    m = induced_maps(FGAbHom.identity(A), 2)
    assert m.torsion.is_isomorphism() and m.cotorsion.is_isomorphism()
    assert m.torsion.source.invariants == (2,)


def test_induced_maps_times_two():
    A = FGAbGroup.cyclic(4)
    psi = FGAbHom(A, A, [[2]])
    m = induced_maps(psi, 2)
    assert m.torsion.is_zero()
    assert m.torsion.kernel()[0].invariants == (2,)
    assert torsion_kernel_identity(psi, 2)


def test_cotorsion_comparison_differs_in_general():
    psi = FGAbHom(FGAbGroup(1), FGAbGroup.cyclic(2), [[1]])
    (left, right), iso = cotorsion_comparison(psi, 2)
    # (Ker psi)/2 = 2Z/4Z has order 2, Ker(psi/2) is trivial
    assert (left, right) == (2, 1) and not iso


def random_group(rng):
    k = rng.randint(0, 3)
    inv = [rng.choice([1, 2, 3, 4, 6, 0]) for _ in range(k)]
    return inv, FGAbGroup(k, [[d if i == j else 0 for j in range(k)] for i, d in enumerate(inv)])


def random_hom(rng):
    ia, A = random_group(rng)
    ib, B = random_group(rng)
    rows = []
    for a in ia:
        row = []
        for b in ib:
            if b == 0:
                step = 0 if a else 1
            else:
                step = b // gcd(a, b) if a else 1
            row.append(step * rng.randint(-3, 3))
        rows.append(row)
    return FGAbHom(A, B, rows)


def _enum_kernel_torsion(psi, n):
    """Elements of the finite part of the source killed by n and by psi (enumeration)."""
    A = psi.source
    count = 0
    for x in A.elements():
        if A.is_zero([n * v for v in x]) and psi.target.is_zero(psi(x)):
            count += 1
    return count


def test_torsion_kernel_identity_random():
    rng = random.Random(2024)
    done = 0
    while done < 200:
        psi = random_hom(rng)
        n = rng.choice([2, 3, 4, 6])
        assert torsion_kernel_identity(psi, n)
        if psi.source.is_finite:
            K, _ = induced_maps(psi, n).torsion.kernel()
            assert K.order == _enum_kernel_torsion(psi, n)
        done += 1


# -- exactness ----------------------------------------------------------------

def test_exact_identity_between_zeros():
    Z2 = FGAbGroup.cyclic(2)
    seq = [FGAbHom.zero(FGAbGroup.trivial(), Z2), FGAbHom.identity(Z2),
           FGAbHom.zero(Z2, FGAbGroup.trivial())]
    assert all(v.exact for v in check_exact(seq))


def test_exact_short_sequence_of_integers():
    Z, Z2 = FGAbGroup(1), FGAbGroup.cyclic(2)
    seq = [FGAbHom.zero(FGAbGroup.trivial(), Z), FGAbHom(Z, Z, [[2]]), FGAbHom(Z, Z2, [[1]]),
           FGAbHom.zero(Z2, FGAbGroup.trivial())]
    assert all(v.exact for v in check_exact(seq))


def test_exactness_detects_failure():
    Z2 = FGAbGroup.cyclic(2)
    ok = check_exact([FGAbHom.zero(Z2, Z2), FGAbHom.identity(Z2)])
    assert ok[0].exact
    bad = check_exact([FGAbHom.zero(Z2, Z2), FGAbHom.zero(Z2, Z2)])
    assert not bad[0].exact and bad[0].composition_zero and not bad[0].kernel_equals_image


def test_not_composable():
    with pytest.raises(NotComposable):
        check_exact([FGAbHom.identity(FGAbGroup.cyclic(2)), FGAbHom.identity(FGAbGroup.cyclic(3))])
