from fractions import Fraction

import pytest

from operad_forge.barcobar import ell
from operad_forge.main_theorem import (closed_form_id_ass, closed_form_id_com, closed_form_u, generator_sign,
                                       m_psi, manin_factorisation_holds, manin_morphism, manin_square,
                                       mbar_psi, mutation_trials, psi_elements, stock_morphism)
from operad_forge.tree_calculus import corolla

STOCK = ["id_com", "id_lie", "id_ass", "u", "a", "id_as"]


@pytest.mark.parametrize("name", STOCK)
def test_stock_morphisms_are_operad_morphisms(name):
    assert stock_morphism(name, 4).check(4)


def test_unknown_morphism_rejected():
    with pytest.raises((KeyError, ValueError)):
        stock_morphism("nope", 3)


def test_composite_ua_sends_bracket_to_zero():
    u, a = stock_morphism("u", 3), stock_morphism("a", 3)
    ua = u.compose_after(a)
    assert ua.check(3)
    assert not ua(("b", 2, (1,)))


class TestPsiElements:
    def test_identity_of_com(self):
        P = psi_elements(stock_morphism("id_com", 4), 4)
        for n in range(2, 5):
            assert P.by_q(n) == {("mu", n): [(("mu", n), 1)]}

    def test_u_pairs_every_m_sigma_with_mu(self):
        P = psi_elements(stock_morphism("u", 4), 4)
        for n in range(2, 5):
            terms = P.by_q(n)
            assert len(terms) == len(P.Q.basis(n))
            assert all(v == [(("mu", n), 1)] for v in terms.values())

    def test_a_in_arity_two(self):
        P = psi_elements(stock_morphism("a", 3), 3)
        assert P.by_q(2) == {("b", 2, (1,)): [(("m", (0, 1)), 1), (("m", (1, 0)), -1)]}

    @pytest.mark.parametrize("name", STOCK)
    def test_identities_hold(self, name):
        res = psi_elements(stock_morphism(name, 4), 4).verify(4)
        assert all(res.values()), res

    def test_round_trip_to_morphism(self):
        psi = stock_morphism("a", 4)
        back = psi_elements(psi, 4).to_morphism()
        for n in range(2, 5):
            for q in psi.source.basis(n):
                assert back(q) == psi(q)

    def test_mutations_are_caught(self):
        trials = mutation_trials(stock_morphism("u", 4), 20, 4, 3)
        assert all(t[-1] for t in trials)


class TestMPsi:
    @pytest.mark.parametrize("name", STOCK)
    def test_chain_map(self, name):
        M = m_psi(stock_morphism(name, 4), 4)
        assert M.is_chain_map(4)

    def test_closed_forms(self):
        Mc = m_psi(stock_morphism("id_com", 4), 4)
        Ma = m_psi(stock_morphism("id_ass", 4), 4)
        Mu = m_psi(stock_morphism("u", 4), 4)
        for n in range(2, 5):
            assert Mc.generator_image(n) == closed_form_id_com(Mc, n)
            assert Ma.generator_image(n) == closed_form_id_ass(Ma, n)
            assert Mu.generator_image(n) == closed_form_u(Mu, n)

    def test_id_com_image_is_single_term(self):
        M = m_psi(stock_morphism("id_com", 4), 4)
        assert M.generator_image(3) == {(("mu", 3), (("g", ("mu", 3)), (0, 1, 2))): 1}

    def test_id_ass_image_has_n_factorial_terms(self):
        M = m_psi(stock_morphism("id_ass", 4), 4)
        assert len(M.generator_image(3)) == 6
        assert set(map(abs, M.generator_image(3).values())) == {1}

    def test_generator_signs(self):
        assert [generator_sign(n) for n in range(2, 6)] == [1, -1, -1, 1]


class TestMBar:
    def test_arity_two_value(self):
        Mb = mbar_psi(stock_morphism("id_com", 3), 3, 2)
        b = Mb.bar.basis(2)[0]
        assert Mb.value(corolla(ell(2), 2), b) == {("mu", 2): 1}

    def test_generator_vanishes_on_weight_two(self):
        Mb = mbar_psi(stock_morphism("id_com", 3), 3, 2)
        for b in Mb.bar.basis(3, 2):
            assert not Mb.value(corolla(ell(3), 3), b)

    @pytest.mark.parametrize("name", ["id_com", "id_ass", "u"])
    def test_chain_map(self, name):
        Mb = mbar_psi(stock_morphism(name, 4), 4, 3)
        for n in range(2, 5):
            for b in Mb.bar.basis(n):
                assert not Mb.chain_defect(n, b)


class TestManin:
    @pytest.mark.parametrize("name", ["id_com", "id_lie", "id_ass", "u", "a"])
    def test_well_defined_and_factorises(self, name):
        psi = stock_morphism(name, 4)
        assert manin_morphism(psi, 4).is_well_defined()
        assert manin_factorisation_holds(psi, 4)

    def test_square(self):
        sq = manin_square(stock_morphism("u", 4), 4)
        assert sq[2][0] == sq[2][1] and sq[2][0]
        assert not sq[3][0] and not sq[3][1]
