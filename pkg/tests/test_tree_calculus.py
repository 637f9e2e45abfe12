import random

import pytest

from operad_forge.operad_base import check_parallel, check_sequential
from operad_forge.smodule_operad import Ass, Com, GeneratorModule, Lie, com_generators
from operad_forge.tree_calculus import (FreeOperad, admissible_cuts, arity_of, corolla, enumerate_trees,
                                        eval_all_orders, eval_tree, from_nested, leaves, schroeder_count,
                                        switch_map, to_nested, tree_double, weight)

MU = ("mu", 2)


def comb(k):
    """Left comb of k binary vertices."""
    t = corolla(MU, 2)
    for j in range(2, k + 1):
        t = (MU, (t, j))
    return t


def test_three_binary_trees():
    assert len(enumerate_trees(com_generators(), 3, 2, min_weight=2)) == 3


def test_ass_generators_give_twelve_trees():
    assert len(enumerate_trees(Ass(2), 3, 2, min_weight=2)) == 12


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_tree_counts_match_independent_recursion(n):
    for w in range(1, n):
        # one trivially acted label per arity >= 2, no unary vertices
        M = GeneratorModule([(("mu", k), k, 0) for k in range(2, n + 1)], action=lambda g, p: {g: 1})
        got = len(enumerate_trees(M, n, w, min_weight=w))
        assert got == schroeder_count(n, w)


def test_enumerated_trees_are_distinct_and_well_formed():
    trees = enumerate_trees(Com(4), 4, 3)
    assert len(trees) == len(set(trees))
    for t in trees:
        assert sorted(leaves(t)) == [0, 1, 2, 3]
        assert arity_of(t) == 4


def test_left_comb_composes_to_mu_n():
    for k in range(1, 5):
        assert eval_tree(comb(k), Com(5)) == {("mu", k + 1): 1}


def test_every_composition_order_agrees():
    rng = random.Random(5)
    trees = enumerate_trees(Lie(4), 4, 3, min_weight=2)
    for t in rng.sample(trees, 10):
        values = eval_all_orders(t, Lie(4))
        assert all(v == values[0] for v in values)


def test_weight():
    assert weight(comb(3)) == 3
    assert weight(0) == 0


def test_nested_round_trip():
    t = comb(3)
    assert from_nested(to_nested(t), lambda s: MU) == t
    assert to_nested(corolla(MU, 2))[1:] == [1, 2]


def test_admissible_cuts_of_two_vertex_tree():
    cuts = admissible_cuts(comb(2))
    # empty upper part, root alone, whole tree
    assert len(cuts) == 3
    assert cuts[0][0] is None


def test_tree_double_single_vertex_has_no_sign():
    t = corolla(("m", "n"), 2)
    sign, left, right = tree_double(t, lambda m: 1, lambda n: 1)
    assert sign == 1 and left == corolla("m", 2) and right == corolla("n", 2)


def test_tree_double_odd_labels_sign():
    t = (("m1", "n1"), ((("m2", "n2"), (0, 1)), 2))
    sign, left, right = tree_double(t, lambda m: 1, lambda n: 1)
    # m1 n1 m2 n2 -> m1 m2 n1 n2 swaps the odd pair n1, m2
    assert sign == -1
    assert left == ("m1", (("m2", (0, 1)), 2))


def test_switch_map_inverts_tree_double():
    t = (("m1", "n1"), ((("m2", "n2"), (0, 1)), 2))
    deg = lambda lab: 1
    s1, left, right = tree_double(t, deg, deg)
    s2, back = switch_map(left, right, deg, deg)
    assert back == t and s1 == s2


def test_switch_map_rejects_different_shapes():
    with pytest.raises(ValueError):
        switch_map(comb(2), corolla(MU, 3), lambda m: 0, lambda n: 0)


def test_free_operad_axioms():
    F = FreeOperad(Com(2), 4, 3)
    rng = random.Random(0)
    for _ in range(10):
        x = rng.choice(F.basis(2))
        y = rng.choice(F.basis(2))
        z = rng.choice(F.basis(rng.randint(1, 2)))
        assert check_sequential(F, x, y, z)
        assert check_parallel(F, x, y, z)
