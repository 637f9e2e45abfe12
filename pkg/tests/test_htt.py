from fractions import Fraction

import pytest

from operad_forge.corpus import ass_retraction, lie_retraction, matrix_units, unital_com
from operad_forge.exact_core import GradedSpace
from operad_forge.htt import (Retraction, morphism_compat, structures_equal, transfer, transfer_with_morphisms,
                              trivial_retraction, two_structures)
from operad_forge.linfty_algebra import binary_algebra, identity_infinity, linfty_from_lie, strict_as_infinity
from operad_forge.main_theorem import stock_morphism
from operad_forge.smodule_operad import As, Lie


@pytest.fixture(scope="module")
def lie_data():
    B, r = lie_retraction(4)
    return linfty_from_lie(B), r


class TestRetraction:
    def test_corpus_retractions_are_valid(self):
        _, r = lie_retraction(4)
        assert not r.violations()
        assert all(r.side_conditions().values())

    def test_bad_homotopy_rejected(self):
        V = GradedSpace("B", [("u", 1), ("v", 0)], {(1, 0): 1})
        C = GradedSpace("C", [])
        with pytest.raises(ValueError, match="not a retraction"):
            Retraction(V, C, {}, {}, {})

    def test_tensor_left_is_retraction(self):
        _, r = lie_retraction(4)
        A = GradedSpace("A", [("a", 1), ("b", 0)])
        assert not r.tensor_left(A).violations()


class TestTransfer:
    def test_trivial_retraction_keeps_structure(self, lie_data):
        H, _ = lie_data
        HC = transfer(H, trivial_retraction(H.V), 4)
        assert all(HC.bracket(n) == H.bracket(n) for n in range(2, 5))

    def test_trivial_retraction_gives_identity_morphisms(self, lie_data):
        H, _ = lie_data
        HC, i_inf, p_inf = transfer_with_morphisms(H, trivial_retraction(H.V), 4)
        assert i_inf.equals(identity_infinity(H), 3)
        assert p_inf.equals(identity_infinity(H), 3)

    def test_transferred_structure_is_valid_with_higher_brackets(self, lie_data):
        H, r = lie_data
        HC = transfer(H, r, 4)
        assert HC.is_valid(4)
        assert HC.bracket(3) and HC.bracket(4)

    def test_i_and_p_are_infinity_morphisms(self, lie_data):
        H, r = lie_data
        _, i_inf, p_inf = transfer_with_morphisms(H, r, 4)
        assert i_inf.is_coalgebra_map(3)
        assert p_inf.is_coalgebra_map(3)

    def test_planar_transfer(self):
        B, r = ass_retraction(As(4), 4)
        HC = transfer(strict_as_infinity(B, "As", 4), r, 4)
        assert HC.is_valid(4) and HC.bracket(3)


def test_pipelines_trivial_homotopy():
    # h = 0 and B = C: both paths are the tensor product of strict algebras
    psi = stock_morphism("id_com", 4)
    V = GradedSpace("B", [("x", 0), ("y", 0)])
    B = binary_algebra(Lie(4), V, {(0, 1): {1: 1}, (1, 0): {1: -1}}, 4, "B")
    A = unital_com(4, 2)
    data = two_structures(A, B, trivial_retraction(B.V), psi, 4)
    assert all(structures_equal(data["path1"], data["path2"], 4).values())


def test_pipelines_planar():
    psi = stock_morphism("id_as", 4)
    B, r = ass_retraction(As(4), 4)
    A = matrix_units(As(4), 4)
    data = two_structures(A, B, r, psi, 4)
    assert all(structures_equal(data["path1"], data["path2"], 4).values())
    assert all(morphism_compat(A, B, r, psi, 4, 3, data).values())
