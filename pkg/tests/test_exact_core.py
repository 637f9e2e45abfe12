from fractions import Fraction

import pytest

from operad_forge.exact_core import (GradedSpace, LinearMap, Permutation, RowReducer, all_perms,
                                     coinvariants_to_invariants, desuspension_power_sign, enumerate_shuffles,
                                     hom_differential, invariants_to_coinvariants, is_invariant, kernel_relations,
                                     koszul_sign, perm_compose, perm_inverse, perm_sign, shift_word_sign,
                                     solve_in_span, tensor_map, tensor_space, vadd, vclean, vscale)


def swap_action(g, vec):
    # regular representation of S_2 on basis {0, 1}
    if g == (0, 1):
        return dict(vec)
    return {1 - k: c for k, c in vec.items()}


class TestVectors:
    def test_vadd_drops_zeros(self):
        acc = {"a": Fraction(1)}
        vadd(acc, {"a": -1, "b": 2})
        assert acc == {"b": 2}

    def test_scale_by_zero_is_empty(self):
        assert vscale({"a": 3}, 0) == {}

    def test_vclean(self):
        assert vclean({"a": 0, "b": Fraction(1, 2)}) == {"b": Fraction(1, 2)}


class TestPermutations:
    def test_composition_convention(self):
        # (στ)(k) = σ(τ(k))
        s, t = (1, 2, 0), (1, 0, 2)
        assert perm_compose(s, t) == tuple(s[t[k]] for k in range(3))

    def test_inverse(self):
        for p in all_perms(4):
            assert perm_compose(p, perm_inverse(p)) == (0, 1, 2, 3)

    def test_sign_of_transposition_and_cycle(self):
        assert perm_sign((1, 0, 2)) == -1
        assert perm_sign((1, 2, 0)) == 1

    def test_permutation_class(self):
        p = Permutation.transposition(3, 0, 2)
        assert p.sign() == -1
        assert p.inverse() == p
        assert Permutation.identity(3).images == (1, 2, 3)


class TestKoszul:
    def test_identity(self):
        assert koszul_sign((0, 1, 2), [1, 3, 5]) == 1

    def test_odd_transposition(self):
        assert koszul_sign((1, 0), [1, 1]) == -1

    def test_three_cycle_frozen(self):
        # frozen from the adjacent-transposition oracle: the odd z passes
        # the even y (no sign) and then the odd x (sign), in either direction
        assert koszul_sign((1, 2, 0), [1, 2, 1]) == -1
        assert koszul_sign((2, 0, 1), [1, 2, 1]) == -1

    def test_even_degrees_never_sign(self):
        assert all(koszul_sign(p, [0, 2, 4]) == 1 for p in all_perms(3))


class TestShuffles:
    @pytest.mark.parametrize("sizes,count", [((1, 1), 2), ((2, 1), 3), ((1, 1, 1), 6), ((2, 2), 6)])
    def test_counts(self, sizes, count):
        assert len(enumerate_shuffles(*sizes)) == count

    def test_shuffle_keeps_blocks_ordered(self):
        for sh in enumerate_shuffles(2, 2):
            im = sh.images
            assert im[0] < im[1] and im[2] < im[3]


class TestGradedMaps:
    def setup_method(self):
        self.V = GradedSpace("V", [("a1", 1), ("a0", 0)], {(1, 0): 1})

    def test_chain_map_is_closed(self):
        assert hom_differential(LinearMap.identity(self.V)).is_zero()

    def test_single_generator_identity(self):
        X = GradedSpace("X", [("x", 0)])
        assert hom_differential(LinearMap.identity(X)).is_zero()

    def test_boundary_of_degree_one_map(self):
        # φ: a0 ↦ a1; evaluating d∘φ − (−1)^{|φ|}φ∘d on a0 and a1 gives the identity
        phi = LinearMap(self.V, self.V, 1, {(0, 1): 1})
        dphi = hom_differential(phi)
        assert dphi.apply({1: 1}) == {1: 1}
        assert dphi.apply({0: 1}) == {0: 1}

    def test_tensor_of_identities(self):
        I = LinearMap.identity(self.V)
        assert tensor_map(I, I).entries == LinearMap.identity(tensor_space(self.V, self.V)).entries

    def test_tensor_sign_on_odd_maps(self):
        W = GradedSpace("W", [("u", 1), ("v", 0)])
        g = LinearMap(W, W, -1, {(1, 0): 1})
        # (g⊗g)(u⊗u) = (−1)^{|g||u|} g(u)⊗g(u) = −v⊗v
        assert tensor_map(g, g).entries == {(3, 0): -1}

    def test_degree_mismatch_rejected(self):
        with pytest.raises(ValueError):
            LinearMap(self.V, self.V, 0, {(0, 1): 1})


class TestSigns:
    def test_desuspension_powers(self):
        assert [desuspension_power_sign(n) for n in range(1, 6)] == [1, -1, -1, 1, 1]

    def test_shift_words(self):
        assert shift_word_sign([1, -1]) == -1
        assert shift_word_sign([-1, 1]) == 1


class TestInvariants:
    group = [(0, 1), (1, 0)]

    def test_orbit_sum(self):
        assert coinvariants_to_invariants({0: 1}, self.group, swap_action) == {0: 1, 1: 1}

    def test_round_trip(self):
        inv = coinvariants_to_invariants({0: 1}, self.group, swap_action)
        assert is_invariant(inv, self.group, swap_action)
        cls = invariants_to_coinvariants(inv, self.group, swap_action)
        assert cls == {0: Fraction(1, 2), 1: Fraction(1, 2)}

    def test_trivial_action(self):
        triv = lambda g, v: dict(v)
        inv = coinvariants_to_invariants({0: 1}, self.group, triv)
        assert invariants_to_coinvariants(inv, self.group, triv) == {0: 1}


class TestLinearAlgebra:
    def test_rank_and_membership(self):
        R = RowReducer()
        assert R.add({0: 1, 1: 1})
        assert R.add({1: 1})
        assert not R.add({0: 2, 1: 5})
        assert R.rank == 2 and R.contains({0: 3})

    def test_solve_in_span(self):
        assert solve_in_span([{0: 1}, {1: 2}], {0: 3, 1: 4}) == [3, 2]
        assert solve_in_span([{0: 1}], {1: 1}) is None

    def test_kernel_relations(self):
        rels = kernel_relations([{0: 1}, {0: 2}, {1: 1}])
        assert len(rels) == 1
        r = rels[0]
        assert r.get(0, 0) * 1 + r.get(1, 0) * 2 == 0 and not r.get(2, 0)
