"""Property-based checks of the structural invariants."""

import random
from fractions import Fraction
from math import factorial

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from operad_forge.corpus import three_dim_lie
from operad_forge.exact_core import (GradedSpace, all_perms, coinvariant_class, coinvariants_to_invariants,
                                     enumerate_shuffles, invariants_to_coinvariants, is_invariant, koszul_sign,
                                     perm_compose, perm_inverse, perm_sign)
from operad_forge.linfty_algebra import random_gauge
from operad_forge.mc_and_cobar import FilteredAlgebra, random_complete_element
from operad_forge.operad_base import (check_action_is_right_action, check_equivariance, check_parallel,
                                      check_sequential, check_unit)
from operad_forge.smodule_operad import As, Ass, Com, Lie

SLOW = settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])

perms = st.integers(1, 5).flatmap(lambda n: st.permutations(list(range(n))).map(tuple))


@st.composite
def perm_pair_with_degrees(draw):
    n = draw(st.integers(1, 5))
    s = tuple(draw(st.permutations(list(range(n)))))
    t = tuple(draw(st.permutations(list(range(n)))))
    degs = draw(st.lists(st.integers(-3, 3), min_size=n, max_size=n))
    return s, t, degs


@given(perm_pair_with_degrees())
def test_koszul_cocycle(data):
    s, t, d = data
    tinv = perm_inverse(t)
    moved = [d[tinv[k]] for k in range(len(d))]
    assert koszul_sign(perm_compose(s, t), d) == koszul_sign(t, d) * koszul_sign(s, moved)


@given(perms)
def test_koszul_extremes(p):
    n = len(p)
    assert koszul_sign(p, [2] * n) == 1
    assert koszul_sign(p, [1] * n) == perm_sign(p)


@given(perm_pair_with_degrees())
def test_permutation_group_laws(data):
    s, t, _ = data
    n = len(s)
    ident = tuple(range(n))
    assert perm_compose(s, perm_inverse(s)) == ident == perm_compose(perm_inverse(s), s)
    assert perm_compose(s, ident) == s
    assert perm_sign(perm_compose(s, t)) == perm_sign(s) * perm_sign(t)
    u = perm_inverse(t)
    assert perm_compose(perm_compose(s, t), u) == perm_compose(s, perm_compose(t, u))


@given(st.lists(st.integers(1, 3), min_size=1, max_size=3))
def test_shuffle_count_is_multinomial(sizes):
    expected = factorial(sum(sizes))
    for k in sizes:
        expected //= factorial(k)
    assert len(enumerate_shuffles(*sizes)) == expected


@given(st.integers(2, 3), st.dictionaries(st.integers(0, 5), st.fractions(max_denominator=4), max_size=4))
def test_invariants_coinvariants_round_trip(n, coeffs):
    P = Ass(n)
    basis = P.basis(n)
    vec = {basis[k % len(basis)]: c for k, c in coeffs.items() if c}
    group = all_perms(n)
    act = lambda g, v: P.act_vec(v, g)
    inv = coinvariants_to_invariants(vec, group, act)
    assert is_invariant(inv, group, act)
    assert invariants_to_coinvariants(inv, group, act) == coinvariant_class(vec, group, act)


OPERADS = [Com(5), Lie(5), Ass(5), As(5)]


@given(st.sampled_from(OPERADS), st.integers(2, 3), st.integers(1, 2), st.integers(1, 2),
       st.integers(0, 10 ** 6))
def test_operad_axioms_on_random_basis_triples(P, m, a, b, pick):
    rng = random.Random(pick)
    x = rng.choice(P.basis(m))
    y = rng.choice(P.basis(a + 1))
    z = rng.choice(P.basis(b))
    assert check_sequential(P, x, y, z)
    assert check_parallel(P, x, y, z)
    assert check_unit(P, x)
    if P.symmetric:
        assert check_equivariance(P, x, y)
        assert check_action_is_right_action(P, x)


C3 = three_dim_lie(4)


@SLOW
@given(st.integers(0, 10 ** 6))
def test_random_gauge_targets_are_valid(seed):
    g = random_gauge(C3, random.Random(seed))
    assert g.target.is_valid(4)
    assert not g.target.mc_residual({})


@SLOW
@given(st.integers(0, 10 ** 6), st.sampled_from(["Lie", "Ass"]))
def test_complete_structure_map_on_random_elements(seed, which):
    P = Lie(5) if which == "Lie" else Ass(5)
    F = FilteredAlgebra.free(P, GradedSpace("V", [("x", 0), ("y", 0)]), 3)
    x = random_complete_element(F, 5, random.Random(seed))
    assert F.gamma_hat(x) == F.direct(x)


@given(st.fractions(max_denominator=10))
def test_quadratic_mc_residual(t):
    from operad_forge.linfty_algebra import binary_algebra, linfty_from_lie
    V = GradedSpace("L", [("x", -1), ("y", -2)])
    H = linfty_from_lie(binary_algebra(Lie(3), V, {(0, 0): {1: 1}}, 3, "L"))
    res = H.mc_residual({0: Fraction(t)} if t else {})
    assert res == ({1: Fraction(t) ** 2 / 2} if t else {})
