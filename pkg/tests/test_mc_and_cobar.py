import random
from fractions import Fraction

import pytest

from operad_forge.corpus import mc_pairs, small_coalgebra_algebra, square_zero_pair, truncated_polynomial
from operad_forge.exact_core import GradedSpace
from operad_forge.linfty_algebra import binary_algebra, dual_coalgebra
from operad_forge.main_theorem import stock_morphism
from operad_forge.mc_and_cobar import (CompleteCobar, FilteredAlgebra, MCBijection, MCTwComparison, RelativeBar,
                                       degree_minus_one, deformation_complex, mc_solutions,
                                       random_complete_element, random_degree_minus_one, star_alpha,
                                       star_components, strict_map_as_mc)
from operad_forge.smodule_operad import Ass, Com, Lie


@pytest.fixture(scope="module")
def one_parameter():
    psi = stock_morphism("id_com", 4)
    D = dual_coalgebra(small_coalgebra_algebra("Com", 2, 3, 0, 5, 4))
    A = FilteredAlgebra.free(Com(4), GradedSpace("X", [("x", 0)]), 3).A
    return psi, D, A


class TestFiltered:
    @pytest.mark.parametrize("make", [Lie, Ass, Com])
    def test_free_algebra_is_filtered(self, make):
        F = FilteredAlgebra.free(make(5), GradedSpace("V", [("x", 0), ("y", 0)]), 3)
        assert not F.violations()

    def test_free_lie_dimensions(self):
        # free Lie on two generators: 2 + 1 + 2 words of length <= 3
        F = FilteredAlgebra.free(Lie(5), GradedSpace("V", [("x", 0), ("y", 0)]), 3)
        assert F.A.V.dim == 5

    @pytest.mark.parametrize("make", [Lie, Ass])
    def test_complete_map_matches_direct(self, make):
        F = FilteredAlgebra.free(make(5), GradedSpace("V", [("x", 0), ("y", 0)]), 3)
        rng = random.Random(8)
        for _ in range(5):
            x = random_complete_element(F, 5, rng)
            assert F.gamma_hat(x) == F.direct(x)


class TestStar:
    def test_zero(self, one_parameter):
        assert star_alpha(*one_parameter, {}) == {}

    def test_not_linear(self, one_parameter):
        one = star_alpha(*one_parameter, {(0, 0): Fraction(1)})
        two = star_alpha(*one_parameter, {(0, 0): Fraction(2)})
        assert two != {k: 2 * v for k, v in one.items()}

    def test_arity_n_part_scales_by_n_th_power(self, one_parameter):
        one = star_components(*one_parameter, {(0, 0): Fraction(1)})
        two = star_components(*one_parameter, {(0, 0): Fraction(2)})
        for n, comp in one.items():
            assert two[n] == {k: v * 2 ** n for k, v in comp.items()}


class TestCompleteCobar:
    def test_zero_coproduct_leaves_induced_differential(self):
        psi = stock_morphism("id_com", 4)
        D = dual_coalgebra(small_coalgebra_algebra("Com", 0, 0, 1, 0, 4))
        Om = CompleteCobar(psi, D, 3)
        assert not Om.square_defect()
        # each d is a single term: the differential of D, no quadratic part
        assert all(len(Om.d(b)) <= 1 for b in range(Om.dim))

    @pytest.mark.parametrize("qname,P,mname", mc_pairs(4), ids=["Com", "As", "Ass"])
    def test_square_zero(self, qname, P, mname):
        Om = CompleteCobar(stock_morphism(mname, 4), dual_coalgebra(small_coalgebra_algebra(qname)), 3)
        assert not Om.square_defect()


class TestMCTw:
    @pytest.mark.parametrize("qname,P,mname", mc_pairs(4), ids=["Com", "As", "Ass"])
    def test_random_points(self, qname, P, mname):
        A = FilteredAlgebra.free(P, GradedSpace("X", [("x", 0), ("y", 0)]), 3).A
        cmp = MCTwComparison(stock_morphism(mname, 4), dual_coalgebra(small_coalgebra_algebra(qname)), A)
        rng = random.Random(1)
        for _ in range(5):
            r = cmp.compare(random_degree_minus_one(cmp.H, rng))
            assert all(r["arity_match"].values()) and r["simultaneous"]
        zero = cmp.compare({})
        assert zero["mc_zero"] and zero["tw_zero"]


class TestBijections:
    def test_one_parameter_only_zero(self, one_parameter):
        B = MCBijection(*one_parameter, 3)
        dirs = [{degree_minus_one(B.H)[0]: Fraction(1)}]
        assert mc_solutions(B.H, dirs) == [{}]
        assert all(B.certify({}).values())

    def test_zero_element_gives_zero_morphism(self, one_parameter):
        B = MCBijection(*one_parameter, 3)
        assert not any(B.to_morphism({}).values())

    def test_two_dimensional_locus(self):
        psi = stock_morphism("id_com", 4)
        D = dual_coalgebra(small_coalgebra_algebra("Com", 2, 3, 0, 5, 4))
        B = MCBijection(psi, D, square_zero_pair(4), 2)
        dirs = [{i: Fraction(1)} for i in degree_minus_one(B.H) if B.H.V.label(i)[1] != "xy"][:2]
        sols = mc_solutions(B.H, dirs)
        assert len(sols) == 5
        for s in sols:
            assert all(B.certify(s).values())


class TestDeformationComplex:
    def test_relative_bar_square_zero(self):
        R = RelativeBar(truncated_polynomial(4), 2, 3)
        assert R.dim == 15
        assert any(R.d(b) for b in range(R.dim))
        for b in range(R.dim):
            dd = {}
            for k, c in R.d(b).items():
                for k2, c2 in R.d(k).items():
                    dd[k2] = dd.get(k2, 0) + c * c2
            assert not any(dd.values())

    @pytest.mark.parametrize("lam", [Fraction(1), Fraction(2), Fraction(1, 3)])
    def test_strict_morphisms_are_mc(self, lam):
        X = truncated_polynomial(4)
        H = deformation_complex(X, X, 2, 3)
        assert not H.mc_residual(strict_map_as_mc(X, X, {(0, 0): lam, (1, 1): lam * lam}, H))

    def test_perturbation_detected(self):
        X = truncated_polynomial(4)
        H = deformation_complex(X, X, 2, 3)
        assert H.mc_residual(strict_map_as_mc(X, X, {(0, 0): 1, (1, 1): 2}, H))

    def test_trivial_algebra(self):
        T = binary_algebra(Com(4), GradedSpace("T", [("t", 0)]), {}, 4, "T")
        H = deformation_complex(T, T, 2, 3)
        assert all(not H.bracket(n) for n in range(2, 5))

    def test_valid(self):
        X = truncated_polynomial(4)
        assert deformation_complex(X, X, 2, 3).is_valid(4)
