import random
from fractions import Fraction

import pytest

from operad_forge.corpus import random_unital_endo, three_dim_lie, unital_com
from operad_forge.exact_core import GradedSpace
from operad_forge.linfty_algebra import (HomotopyAlgebra, binary_algebra, convolution_algebra_structure,
                                         dual_coalgebra, dual_of_algebra, hom_structure, hom_tensor_iso_holds,
                                         identity_infinity, infinity_tensor_morphism, linfty_from_lie,
                                         mc_residual_ns, principal_label, pull_back_structure, random_gauge,
                                         strict_as_infinity, strict_morphism, tensor_structure)
from operad_forge.main_theorem import MPsi, identity_morphism, stock_morphism
from operad_forge.smodule_operad import As, Ass, Com, Lie


def dg_lie_line():
    """x (−1), y (−2), [x, x] = y."""
    V = GradedSpace("L", [("x", -1), ("y", -2)])
    return linfty_from_lie(binary_algebra(Lie(4), V, {(0, 0): {1: 1}}, 4, "L"))


class TestAlgebras:
    def test_binary_algebra_checks_axioms(self):
        assert unital_com(4, 3).check(4)

    def test_non_associative_table_rejected(self):
        V = GradedSpace("A", [("a", 0), ("b", 0)])
        with pytest.raises(ValueError):
            binary_algebra(Ass(3), V, {(0, 0): {1: 1}, (1, 0): {0: 1}}, 3, "A")

    def test_pull_back_along_identity(self):
        A = unital_com(4, 2)
        B = pull_back_structure(identity_morphism(A.P, "id"), A)
        for n in range(1, 5):
            for q in A.P.basis(n):
                assert B.structure(q) == A.structure(q)

    def test_pull_back_u(self):
        A = unital_com(3, 2)
        B = pull_back_structure(stock_morphism("u", 3), A)
        assert B.check(3)
        # both orderings of the product give the commutative product
        assert B.operation(("m", (0, 1)), {1: 1}, {0: 1}) == B.operation(("m", (1, 0)), {1: 1}, {0: 1})


class TestHomotopyAlgebras:
    def test_lie_has_no_higher_brackets(self):
        H = dg_lie_line()
        assert H.is_valid(4)
        assert not H.bracket(3) and not H.bracket(4)

    @pytest.mark.parametrize("qname,P", [("Ass", Ass), ("As", As)])
    def test_strict_associative(self, qname, P):
        V = GradedSpace("A", [("a", 0), ("b", 0)])
        A = binary_algebra(P(4), V, {(0, 0): {1: 1}}, 4, "A")
        H = strict_as_infinity(A, qname, 4)
        assert H.is_valid(4) and not H.shifted_square_defect(4)

    def test_random_gauge_is_valid_and_certified(self):
        g = random_gauge(three_dim_lie(4), random.Random(11))
        assert g.target.is_valid(4)
        assert g.is_coalgebra_map(3)
        assert g.component(2)

    def test_jacobi_failure_detected_both_ways(self):
        # [x,y] = z, [x,z] = x violates Jacobi
        V = GradedSpace("N", [("x", 0), ("y", 0), ("z", 0)])
        table = {}
        for (a, b), o in {(0, 1): 2, (0, 2): 0}.items():
            table[("E", o, (a, b))] = Fraction(1)
            table[("E", o, (b, a))] = Fraction(-1)
        H = HomotopyAlgebra(V, "Com", {principal_label("Com", 2): table}, 3, "N")
        assert not H.is_valid(3)
        assert H.shifted_square_defect(3)


class TestMaurerCartan:
    def test_zero(self):
        assert not dg_lie_line().mc_residual({})

    def test_abelian(self):
        V = GradedSpace("L", [("x", -1)])
        H = linfty_from_lie(binary_algebra(Lie(3), V, {}, 3, "L"))
        assert not H.mc_residual({0: Fraction(5)})

    @pytest.mark.parametrize("t", [Fraction(1), Fraction(2), Fraction(-1, 3)])
    def test_quadratic_residual(self, t):
        assert dg_lie_line().mc_residual({0: t}) == {1: t * t / 2}

    def test_associative_residual_has_no_factorial(self):
        V = GradedSpace("A", [("x", -1), ("y", -2)])
        H = strict_as_infinity(binary_algebra(As(3), V, {(0, 0): {1: 1}}, 3, "A"), "As", 3)
        assert mc_residual_ns(H, {0: Fraction(3)}) == {1: 9}

    def test_m3_term_has_coefficient_one(self):
        V = GradedSpace("N", [("x", -1), ("y", -2)])
        H = HomotopyAlgebra(V, "As", {principal_label("As", 2): {("E", 1, (0, 0)): Fraction(1)},
                                      principal_label("As", 3): {("E", 1, (0, 0, 0)): Fraction(1)}}, 4, "N")
        assert H.is_valid(4)
        t = Fraction(2)
        assert mc_residual_ns(H, {0: t}) == {1: t ** 2 + t ** 3}


class TestTensorAndHom:
    def setup_method(self):
        self.psi = stock_morphism("id_com", 4)
        self.A = unital_com(4, 2)
        self.C = three_dim_lie(4)

    def test_tensor_is_valid(self):
        T = tensor_structure(self.A, self.C, self.psi)
        assert T.is_valid(4)

    def test_tensor_with_zero_structure(self):
        V = GradedSpace("C", [("c", -1), ("e", -2)], {(1, 0): 1})
        C = linfty_from_lie(binary_algebra(Lie(4), V, {}, 4, "C"))
        T = tensor_structure(self.A, C, self.psi)
        assert all(not T.bracket(n) for n in range(2, 5))
        assert T.V.d_entries

    @pytest.mark.parametrize("name", ["id_com", "id_ass", "id_as"])
    def test_hom_matches_tensor(self, name):
        psi = stock_morphism(name, 4)
        P = psi.target
        V = GradedSpace("A", [("a", 0), ("b", 0)])
        A = binary_algebra(P, V, {(0, 0): {1: 1}}, 4, "A")
        if name == "id_com":
            C = self.C
        else:
            W = GradedSpace("C", [("c", -1), ("e", -2)])
            qname = "Ass" if name == "id_ass" else "As"
            C = strict_as_infinity(binary_algebra(P, W, {(0, 0): {1: 1}}, 4, "C"), qname, 4)
        assert all(hom_tensor_iso_holds(A, C, psi).values())

    def test_identity_tensor_identity_is_identity(self):
        T = tensor_structure(self.A, self.C, self.psi)
        F = infinity_tensor_morphism({(0, 0): 1, (1, 1): 1}, self.A, self.A, identity_infinity(self.C),
                                     self.psi, T, T)
        assert F.equals(identity_infinity(T), 3)

    def test_strict_g_gives_strict_tensor(self):
        T = tensor_structure(self.A, self.C, self.psi)
        g = strict_morphism(self.C, self.C, {(0, 0): 1, (1, 1): 2, (2, 2): 2})
        assert g.is_coalgebra_map(3)
        F = infinity_tensor_morphism({(0, 0): 1, (1, 1): 1}, self.A, self.A, g, self.psi, T, T)
        assert F.is_coalgebra_map(3)
        assert all(not F.component(n) for n in range(2, 5))

    def test_non_strict_g_certificate(self):
        A = unital_com(4, 3)
        rng = random.Random(4)
        g = random_gauge(self.C, rng)
        M = MPsi(self.psi, 4)
        src, tgt = tensor_structure(A, self.C, self.psi, M), tensor_structure(A, g.target, self.psi, M)
        F = infinity_tensor_morphism(random_unital_endo(rng), A, A, g, self.psi, src, tgt, M)
        assert F.is_coalgebra_map(3)

    def test_hom_structure_of_dual_is_valid(self):
        H = hom_structure(dual_coalgebra(self.C), unital_com(4, 2), self.psi)
        assert H.is_valid(4)


class TestConvolution:
    def test_hom_from_trivial_coalgebra_is_the_algebra(self):
        A = unital_com(3, 2)
        k = binary_algebra(Com(3), GradedSpace("k", [("1", 0)]), {(0, 0): {0: 1}}, 3, "k")
        H = convolution_algebra_structure(dual_of_algebra(k), A, Com(3))
        assert H.check(3)
        assert H.V.dim == A.V.dim

    @pytest.mark.parametrize("degs", [(0, 0), (1, 2), (-1, 0)])
    def test_convolution_algebra_axioms(self, degs):
        B = binary_algebra(Ass(3), GradedSpace("B", [("u", degs[0]), ("v", 2 * degs[0])]),
                           {(0, 0): {1: 1}}, 3, "B")
        A = binary_algebra(Ass(3), GradedSpace("A", [("a", degs[1]), ("b", 2 * degs[1])]),
                           {(0, 0): {1: 1}}, 3, "A")
        assert convolution_algebra_structure(dual_of_algebra(B), A, Ass(3)).check(3)
