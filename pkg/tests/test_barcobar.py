import pytest

from operad_forge.barcobar import (BarConstruction, a_infinity, a_gen, c_infinity, canonical_pi,
                                   check_d_squared, ell, extend_from_generators, h0_rank,
                                   is_chain_morphism_on_generators, l_infinity, resolution_to_lie,
                                   rosetta_round_trip)
from operad_forge.smodule_operad import Ass, Com, Lie, ass_data, com_data, lie_data, presented_operad


def test_bar_of_ass_arity_three():
    B = BarConstruction(Ass(3), 3, 2)
    assert len(B.basis(3, 1)) == 6
    assert len(B.basis(3, 2)) == 12


@pytest.mark.parametrize("make", [Com, Lie, Ass], ids=["Com", "Lie", "Ass"])
def test_bar_differential_squares_to_zero(make):
    B = BarConstruction(make(4), 4, 3)
    assert all(B.check_d_squared(n) for n in range(2, 5))


def test_bar_d_vanishes_on_corollas():
    B = BarConstruction(Com(4), 4, 3)
    for t in B.basis(3, 1):
        assert not B.d(t)


@pytest.mark.parametrize("build", [l_infinity, a_infinity, c_infinity], ids=["L", "A", "C"])
def test_cobar_differential_squares_to_zero(build):
    Om = build(5)
    assert all(check_d_squared(Om, n) for n in range(2, 6))


def test_l_infinity_generator_differential():
    d3 = l_infinity(4).d_generator(("mu", 3))
    assert len(d3) == 3
    assert sorted(d3.values()) == [-1, -1, 1]


def test_a_infinity_generator_differential():
    d3 = a_infinity(4).d_generator(("a", 3))
    assert len(d3) == 2


def test_generator_degrees():
    L = l_infinity(5)
    A = a_infinity(5)
    for n in range(2, 6):
        assert L.G.degree(ell(n)) == n - 2
        assert A.G.degree(a_gen(n)) == n - 2


@pytest.mark.parametrize("data,build,dims", [(com_data, l_infinity, [1, 1, 2, 6]),
                                             (lie_data, c_infinity, [1, 1, 1, 1]),
                                             (ass_data, a_infinity, [1, 2, 6, 24])],
                         ids=["Lie", "Com", "Ass"])
def test_resolution_zeroth_homology(data, build, dims):
    # H_0 of the cobar of Q^¡ recovers the Koszul dual in each arity
    Om = build(4)
    if Om.symmetric:
        assert [h0_rank(Om, n) for n in range(2, 5)] == dims[1:]


def test_canonical_pi_is_twisting():
    for P in (Com(4), Ass(4)):
        B = BarConstruction(P, 4, 3)
        pi = canonical_pi(B)
        assert all(not pi.mc_residual(t) for n in range(2, 5) for t in B.basis(n))


def test_resolution_to_lie_is_chain_map():
    Om = l_infinity(4)
    L = Lie(4)
    f = resolution_to_lie(Om, L)
    gen_map = lambda lab: f(Om.generator(lab))
    assert is_chain_morphism_on_generators(Om, L, gen_map, 4)
    assert rosetta_round_trip(Om, L, gen_map, 4)


def test_non_twisting_generator_map_is_detected():
    Om = l_infinity(4)
    L = Lie(4)
    b = {("b", 2, (1,)): 1}
    lie3 = L.basis(3)[0]
    # sending ℓ_3 to a non-zero bracket breaks d∘f = f∘d
    gen_map = lambda lab: b if Om.G.arity(lab) == 2 else ({lie3: 1} if Om.G.arity(lab) == 3 else {})
    assert not is_chain_morphism_on_generators(Om, L, gen_map, 4)
