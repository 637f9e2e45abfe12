import json
import random
from math import factorial

import pytest

from operad_forge.exact_core import GradedSpace, all_perms
from operad_forge.operad_base import (check_action_is_right_action, check_equivariance, check_parallel,
                                      check_sequential, check_unit)
from operad_forge.smodule_operad import (As, Ass, Com, DualCooperad, Lie, ass_data, com_data, convolution_operad,
                                         endomorphism_operad, hadamard, koszul_dual_operad, lie_data,
                                         operadic_suspension, presentation_from_json, presentation_to_json,
                                         presented_operad, suspension_operad, suspension_power_sign)


def random_triples(P, rng, count=8):
    for _ in range(count):
        x = rng.choice(P.basis(rng.randint(2, 3)))
        y = rng.choice(P.basis(rng.randint(1, 2) + 1))
        z = rng.choice(P.basis(rng.randint(1, 2)))
        yield x, y, z


@pytest.mark.parametrize("make", [Com, Lie, Ass, As], ids=["Com", "Lie", "Ass", "As"])
def test_stock_operad_axioms(make):
    P = make(5)
    rng = random.Random(1)
    for x, y, z in random_triples(P, rng):
        assert check_sequential(P, x, y, z)
        assert check_parallel(P, x, y, z)
        assert check_unit(P, x)
        if P.symmetric:
            assert check_equivariance(P, x, y)
            assert check_action_is_right_action(P, x)


def test_stock_dimensions():
    assert [Com(5).dim(n) for n in range(1, 6)] == [1] * 5
    assert [Lie(5).dim(n) for n in range(1, 6)] == [factorial(n - 1) for n in range(1, 6)]
    assert [Ass(5).dim(n) for n in range(1, 6)] == [factorial(n) for n in range(1, 6)]
    assert [As(5).dim(n) for n in range(1, 6)] == [1] * 5


def test_lie_bracket_in_ass():
    L = Lie(3)
    assert L.to_ass({L.basis(2)[0]: 1}) == {("m", (0, 1)): 1, ("m", (1, 0)): -1}


def test_endomorphism_operad_of_a_line():
    E = endomorphism_operad(GradedSpace("k", [("x", 0)]), 4)
    assert [E.dim(n) for n in range(1, 5)] == [1, 1, 1, 1]


def test_endomorphism_of_shifted_line_is_suspension():
    E = endomorphism_operad(GradedSpace("ks", [("s", 1)]), 4)
    S = suspension_operad(4)
    for n in range(1, 5):
        assert E.dim(n) == S.dim(n) == 1
        assert E.degree(E.basis(n)[0]) == S.degree(S.basis(n)[0]) == 1 - n


def test_suspension_power_signs():
    assert [suspension_power_sign(n) for n in range(1, 6)] == [(-1) ** (n * (n - 1) // 2) for n in range(1, 6)]


def test_operadic_suspension_degrees():
    SP = operadic_suspension(Com(4))
    assert [SP.degree(SP.basis(n)[0]) for n in range(1, 5)] == [0, -1, -2, -3]


def test_hadamard_dimensions_and_unit():
    H = hadamard(Com(4), Ass(4))
    assert [H.dim(n) for n in range(1, 5)] == [1, 2, 6, 24]
    assert H.unit() == {(("mu", 1), ("m", (0,))): 1}
    rng = random.Random(2)
    for x, y, z in random_triples(H, rng, 4):
        assert check_sequential(H, x, y, z)
        assert check_equivariance(H, x, y)


def test_convolution_operad_dimensions_and_axioms():
    C = convolution_operad(DualCooperad(Com(4)), Lie(4))
    assert [C.dim(n) for n in range(1, 5)] == [1, 1, 2, 6]
    rng = random.Random(3)
    for x, y, z in random_triples(C, rng, 4):
        assert check_sequential(C, x, y, z)
        assert check_parallel(C, x, y, z)


@pytest.mark.parametrize("data,dims", [(com_data, [1, 1, 1, 1, 1]), (lie_data, [1, 1, 2, 6, 24]),
                                       (ass_data, [1, 2, 6, 24, 120])], ids=["Com", "Lie", "Ass"])
def test_presented_dimensions(data, dims):
    P = presented_operad(data(), 5)
    assert [P.dim(n) for n in range(1, 6)] == dims


@pytest.mark.parametrize("data,dims", [(com_data, [1, 1, 2, 6]), (lie_data, [1, 1, 1, 1]),
                                       (ass_data, [1, 2, 6, 24])], ids=["Com", "Lie", "Ass"])
def test_koszul_dual_dimensions(data, dims):
    dual = koszul_dual_operad(presented_operad(data(), 4), 4)
    assert [dual.dim(n) for n in range(1, 5)] == dims


def test_presentation_json_round_trip():
    obj = json.loads(json.dumps(presentation_to_json(lie_data())))
    P = presented_operad(presentation_from_json(obj), 4)
    assert [P.dim(n) for n in range(1, 5)] == [1, 1, 2, 6]


def test_unstable_relation_is_rejected():
    obj = presentation_to_json(lie_data())
    # keep one of the three Jacobi terms: not closed under S_3
    obj["relations"] = [obj["relations"][0][:1]]
    with pytest.raises(ValueError, match="relation 0"):
        presentation_from_json(obj)


def test_unknown_label_is_rejected():
    obj = presentation_to_json(com_data())
    obj["relations"][0][0][0][0] = "nope"
    with pytest.raises(ValueError, match="unknown generator"):
        presentation_from_json(obj)


def test_ass_action_is_regular():
    A = Ass(3)
    m = A.basis(3)[0]
    images = {next(iter(A.act(m, p))) for p in all_perms(3)}
    assert len(images) == 6
