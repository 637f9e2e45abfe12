"""Small reference examples shared by the verification suites and the tests.

Every example is exact and small enough to check in seconds.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, List, Tuple

from .exact_core import GradedSpace
from .htt import Retraction
from .linfty_algebra import HomotopyAlgebra, PAlgebra, binary_algebra, linfty_from_lie, principal_label
from .main_theorem import OperadMorphism, stock_morphism
from .smodule_operad import As, Ass, Com, Lie


def _antisymmetric(ix: Dict[str, int], pairs, degs) -> Dict:
    table = {}
    for (a, b), (out, c) in pairs.items():
        a, b, out = ix[a], ix[b], ix[out]
        table[(a, b)] = {out: c}
        table[(b, a)] = {out: -c * (-1) ** (degs[a] * degs[b])}
    return table


def _retraction(names, ix, d, keep, homotopy) -> Tuple[GradedSpace, GradedSpace, Retraction]:
    B = GradedSpace("B", names, d)
    kept = [names[ix[k]] for k in keep]
    pos = {ix[k]: j for j, k in enumerate(keep)}
    C = GradedSpace("C", kept, {(pos[t], pos[s]): c for (t, s), c in d.items() if t in pos and s in pos})
    i = {(ix[k], j): 1 for j, k in enumerate(keep)}
    p = {(j, ix[k]): 1 for j, k in enumerate(keep)}
    return B, C, Retraction(B, C, i, p, homotopy)


def lie_retraction(cap: int = 4) -> Tuple[PAlgebra, Retraction]:
    """A dg Lie algebra B with three acyclic pairs, retracting onto a
    subcomplex C that keeps one pair; the transferred ℓ_3 and ℓ_4 are non-zero."""
    names = [("x", 0), ("y", 0), ("z", 0), ("q", 0), ("m", 0), ("u1", 1), ("v1", 0),
             ("c2", 2), ("b2", 1), ("t", 2), ("s", 1)]
    ix = {n: k for k, (n, _) in enumerate(names)}
    d = {(ix["v1"], ix["u1"]): 1, (ix["b2"], ix["c2"]): 1, (ix["s"], ix["t"]): 1}
    B, C, r = _retraction(names, ix, d, ["x", "y", "z", "q", "m", "t", "s"],
                          {(ix["u1"], ix["v1"]): 1, (ix["c2"], ix["b2"]): 1})
    table = _antisymmetric(ix, {("x", "y"): ("v1", 1), ("u1", "z"): ("b2", 1), ("c2", "q"): ("t", 1),
                                ("b2", "q"): ("s", 1), ("z", "q"): ("m", 1), ("m", "u1"): ("s", -1)},
                           B.degrees())
    return binary_algebra(Lie(cap), B, table, cap, "B"), r


def ass_retraction(P, cap: int = 4) -> Tuple[PAlgebra, Retraction]:
    """An associative dg algebra (symmetric or planar operad P) with a
    retraction whose transferred m_3, m_4 are non-zero."""
    names = [("x", 0), ("y", 0), ("z", 0), ("r", 0), ("u1", 1), ("v1", 0), ("t", 1), ("s", 0)]
    ix = {n: k for k, (n, _) in enumerate(names)}
    d = {(ix["v1"], ix["u1"]): 1, (ix["s"], ix["t"]): 1}
    B, C, r = _retraction(names, ix, d, ["x", "y", "z", "r", "t", "s"], {(ix["u1"], ix["v1"]): 1})
    products = {("x", "y"): "v1", ("u1", "z"): "t", ("v1", "z"): "s", ("y", "z"): "r", ("x", "r"): "s"}
    table = {(ix[a], ix[b]): {ix[o]: 1} for (a, b), o in products.items()}
    return binary_algebra(P, B, table, cap, "B"), r


def unital_com(cap: int = 4, dim: int = 2) -> PAlgebra:
    """k[e]/(e^dim) with basis 1, e, e², …"""
    names = [("1", 0), ("e", 0), ("e2", 0), ("e3", 0)][:dim]
    table = {}
    for a in range(dim):
        for b in range(dim):
            if a + b < dim:
                table[(a, b)] = {a + b: 1}
    return binary_algebra(Com(cap), GradedSpace("A", names), table, cap, "A")


def matrix_units(P, cap: int = 4) -> PAlgebra:
    """span{e11, e12} inside 2×2 matrices."""
    A = GradedSpace("A", [("e11", 0), ("e12", 0)])
    return binary_algebra(P, A, {(0, 0): {0: 1}, (0, 1): {1: 1}}, cap, "A")


def htt_corpus(cap: int = 4) -> List[Tuple[str, PAlgebra, PAlgebra, Retraction, OperadMorphism]]:
    """(name, A, B, r, Ψ) triples for comparing the two transfer pipelines."""
    LB, r = lie_retraction(cap)
    out = [("id_com", unital_com(cap), LB, r, stock_morphism("id_com", cap))]
    for name, P in (("id_ass", Ass(cap)), ("id_as", As(cap))):
        AB, r2 = ass_retraction(P, cap)
        out.append((name, matrix_units(P, cap), AB, r2, stock_morphism(name, cap)))
    return out


def three_dim_lie(cap: int = 4) -> HomotopyAlgebra:
    """The graded Lie algebra x (0), y (−1), z (−1) with [x,y] = y, [x,z] = z."""
    V = GradedSpace("C", [("x", 0), ("y", -1), ("z", -1)])
    L = binary_algebra(Lie(cap), V, {(0, 1): {1: 1}, (1, 0): {1: -1}, (0, 2): {2: 1}, (2, 0): {2: -1}}, cap, "C")
    return linfty_from_lie(L)


def random_unital_endo(rng: random.Random) -> Dict[Tuple[int, int], Fraction]:
    """An algebra endomorphism of k[e]/(e³): 1 ↦ 1, e ↦ λe + νe², e² ↦ λ²e²."""
    lam = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    nu = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    return {(0, 0): Fraction(1), (1, 1): lam, (2, 1): nu, (2, 2): lam * lam}


def small_coalgebra_algebra(qname: str, alpha=2, beta=3, gamma=1, delta=5, cap: int = 4) -> HomotopyAlgebra:
    """A 2-dimensional homotopy algebra c1 (−1), c2 (−2), d c1 = γ c2, with
    only the operations c1^{⊗n} ↦ c2 for n = 2, 3, 4 (weights α, β, δ)."""
    V = GradedSpace("C", [("c1", -1), ("c2", -2)], {(1, 0): gamma} if gamma else {})
    rho = {principal_label(qname, n): {("E", 1, (0,) * n): Fraction(w)}
           for n, w in ((2, alpha), (3, beta), (4, delta))}
    H = HomotopyAlgebra(V, qname, rho, cap, "C")
    H._fill_by_symmetry()
    return H


def mc_pairs(cap: int = 4):
    """(qname, operad, morphism name) triples used for the MC comparisons."""
    return [("Com", Com(cap), "id_com"), ("As", As(cap), "id_as"), ("Ass", Ass(cap), "id_ass")]


def square_zero_pair(cap: int = 4) -> PAlgebra:
    """span{x, y, xy} with x·y = y·x = xy and all other products zero."""
    V = GradedSpace("A", [("x", 0), ("y", 0), ("xy", 0)])
    return binary_algebra(Com(cap), V, {(0, 1): {2: 1}, (1, 0): {2: 1}}, cap, "A")


def truncated_polynomial(cap: int = 4, name: str = "X") -> PAlgebra:
    """x k[x]/(x³): basis x, x² with x·x = x²."""
    return binary_algebra(Com(cap), GradedSpace(name, [("x", 0), ("x2", 0)]), {(0, 0): {1: 1}}, cap, name)
