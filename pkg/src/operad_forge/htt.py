"""
Homotopy transfer along a retraction (i, p, h) of B onto C.

The transferred structure is the tree sum with i on the leaves, p at the
root and h on every inner edge.  In the shifted picture it is computed by
the recursion

    λ_1 = i,   λ_n = Σ_{k≥2} Σ_{blocks} L_k(ĥλ(block_1), …, ĥλ(block_k)),

where ĥλ = λ_1 on single leaves and h∘λ otherwise; then ℓ'_n = p∘λ_n and
(i_∞)_n = h∘λ_n.  p_∞ comes from the perturbation formula
p̃ Σ_k (δK)^k with K the (symmetrised) tensor-trick homotopy.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Dict, Optional, Tuple

from .exact_core import ONE, GradedSpace, Vector, vadd
from .linfty_algebra import (HomotopyAlgebra, InfinityMorphism, PAlgebra, differential_table,
                             infinity_tensor_morphism, strict_as_infinity, tensor_carrier,
                             tensor_structure)
from .main_theorem import MPsi, OperadMorphism
from .shifted import ShiftedCoalgebra, ShiftedStructure, Word
from .smodule_operad import _sign

Matrix = Dict[Tuple[int, int], Fraction]


def _apply(m: Matrix, vec: Vector) -> Vector:
    out: Vector = {}
    for (t, s), c in m.items():
        if s in vec:
            out[t] = out.get(t, 0) + c * vec[s]
    return {k: v for k, v in out.items() if v}


def _compose(a: Matrix, b: Matrix) -> Matrix:
    out: Matrix = {}
    for (t, m), c in a.items():
        for (m2, s), c2 in b.items():
            if m == m2:
                out[(t, s)] = out.get((t, s), 0) + c * c2
    return {k: v for k, v in out.items() if v}


class Retraction:
    """i: C → B, p: B → C chain maps, h: B → B of degree +1 with
    p i = id_C and d h + h d = id_B − i p."""

    def __init__(self, B: GradedSpace, C: GradedSpace, i: Matrix, p: Matrix, h: Matrix, check: bool = True):
        self.B, self.C = B, C
        self.i = {k: Fraction(v) for k, v in i.items() if v}
        self.p = {k: Fraction(v) for k, v in p.items() if v}
        self.h = {k: Fraction(v) for k, v in h.items() if v}
        if check:
            problems = self.violations()
            if problems:
                raise ValueError("not a retraction: " + ", ".join(problems))

    def violations(self):
        B, C = self.B, self.C
        out = []
        ident_C = {(a, a): ONE for a in range(C.dim)}
        if _compose(self.p, self.i) != ident_C:
            out.append("p∘i ≠ id")
        dB, dC = B.d_entries, C.d_entries
        if _compose(dB, self.i) != _compose(self.i, dC):
            out.append("i is not a chain map")
        if _compose(self.p, dB) != _compose(dC, self.p):
            out.append("p is not a chain map")
        lhs = _compose(dB, self.h)
        for k, v in _compose(self.h, dB).items():
            lhs[k] = lhs.get(k, 0) + v
        rhs = {(a, a): ONE for a in range(B.dim)}
        for k, v in _compose(self.i, self.p).items():
            rhs[k] = rhs.get(k, 0) - v
        if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
            out.append("dh + hd ≠ 1 − ip")
        for (t, s) in self.h:
            if B.degree(t) != B.degree(s) + 1:
                out.append("h does not have degree +1")
                break
        return out

    def side_conditions(self) -> Dict[str, bool]:
        return {"hh": not _compose(self.h, self.h), "hi": not _compose(self.h, self.i),
                "ph": not _compose(self.p, self.h)}

    def tensor_left(self, A: GradedSpace) -> "Retraction":
        """1 ⊗ r on A ⊗ B → A ⊗ C, with (1⊗h)(a⊗b) = (−1)^{|a|} a ⊗ h(b)."""
        B2, C2 = tensor_carrier(A, self.B), tensor_carrier(A, self.C)
        i2, p2, h2 = {}, {}, {}
        for a in range(A.dim):
            for (t, s), c in self.i.items():
                i2[(a * self.B.dim + t, a * self.C.dim + s)] = c
            for (t, s), c in self.p.items():
                p2[(a * self.C.dim + t, a * self.B.dim + s)] = c
            for (t, s), c in self.h.items():
                h2[(a * self.B.dim + t, a * self.B.dim + s)] = c * _sign(A.degree(a))
        return Retraction(B2, C2, i2, p2, h2)


def trivial_retraction(V: GradedSpace) -> Retraction:
    ident = {(a, a): ONE for a in range(V.dim)}
    return Retraction(V, V, ident, dict(ident), {})


# ---------------------------------------------------------------------------
# the tree sums in the shifted picture
# ---------------------------------------------------------------------------

class _Transfer:
    def __init__(self, S: ShiftedStructure, r: Retraction, cap: int):
        self.S, self.r, self.cap = S, r, cap
        self.coB = S.co
        self.coC = ShiftedCoalgebra(r.C.degrees(), symmetric=S.co.symmetric)
        self.L = S.funcs()
        self._lam: Dict[Word, Vector] = {}

    def I(self, c: int) -> Vector:
        return _apply(self.r.i, {c: ONE})

    def H(self, vec: Vector) -> Vector:
        return _apply(self.r.h, vec)

    def P(self, vec: Vector) -> Vector:
        return _apply(self.r.p, vec)

    def lam(self, w: Word) -> Vector:
        if len(w) == 1:
            return self.I(w[0])
        if w in self._lam:
            return self._lam[w]
        out: Vector = {}
        co = self.coC
        for blocks in co.splittings(w):
            k = len(blocks)
            if k < 2 or k not in self.L:
                continue
            order = [p for b in blocks for p in b]
            sgn = co.reorder_sign(w, order) if co.symmetric else 1
            X = {(): Fraction(sgn)}
            for b in blocks:
                sub = tuple(w[p] for p in b)
                arg = self.I(sub[0]) if len(sub) == 1 else self.H(self.lam(sub))
                if not arg:
                    X = {}
                    break
                if self.coB.symmetric:
                    X = self.coB.mul(X, self.coB.as_words(arg))
                else:
                    X = {u + (x,): a * cx for u, a in X.items() for x, cx in arg.items()}
            for u, c in X.items():
                vadd(out, self.L[k](u), c)
        out = {k: v for k, v in out.items() if v}
        self._lam[w] = out
        return out

    def structure(self) -> ShiftedStructure:
        tables = {1: differential_table(self.r.C)}
        for n in range(2, self.cap + 1):
            t = {}
            for w in self.coC.words(n):
                v = self.P(self.lam(w))
                if v:
                    t[w] = v
            tables[n] = t
        return ShiftedStructure(self.coC, tables)

    def i_infinity(self) -> Dict[int, Dict]:
        tables = {1: {(c,): self.I(c) for c in range(self.r.C.dim) if self.I(c)}}
        for n in range(2, self.cap + 1):
            t = {}
            for w in self.coC.words(n):
                v = self.H(self.lam(w))
                if v:
                    t[w] = v
            tables[n] = t
        return tables

    # p_∞ -------------------------------------------------------------------
    def K(self, X: Dict[Word, Fraction]) -> Dict[Word, Fraction]:
        """Tensor-trick homotopy on the cofree coalgebra of sB."""
        co = self.coB
        IP = lambda a: _apply(self.r.i, _apply(self.r.p, {a: ONE}))
        out: Dict[Word, Fraction] = {}
        for w, c in X.items():
            n = len(w)
            if co.symmetric:
                for j in range(n):
                    others = [k for k in range(n) if k != j]
                    for m in range(len(others) + 1):
                        coef = Fraction(factorial(m) * factorial(n - 1 - m), factorial(n))
                        for S in combinations(others, m):
                            rest = [k for k in others if k not in S]
                            order = list(S) + [j] + rest
                            sgn = co.reorder_sign(w, order) * _sign(sum(co.degs[w[k]] for k in S))
                            acc = {(): c * coef * sgn}
                            for k in S:
                                acc = co.mul(acc, co.as_words(IP(w[k])))
                            acc = co.mul(acc, co.as_words(self.H({w[j]: ONE})))
                            acc = co.mul(acc, {tuple(w[k] for k in rest): ONE})
                            for u, cu in acc.items():
                                out[u] = out.get(u, 0) + cu
            else:
                for j in range(n):
                    sgn = _sign(sum(co.degs[w[k]] for k in range(j)))
                    acc = {(): c * sgn}
                    for k in range(j):
                        acc = {u + (x,): a * cx for u, a in acc.items() for x, cx in IP(w[k]).items()}
                    acc = {u + (x,): a * cx for u, a in acc.items() for x, cx in self.H({w[j]: ONE}).items()}
                    acc = {u + tuple(w[j + 1:]): a for u, a in acc.items()}
                    for u, cu in acc.items():
                        out[u] = out.get(u, 0) + cu
        return {k: v for k, v in out.items() if v}

    def delta(self, X):
        L2 = {k: f for k, f in self.L.items() if k >= 2}
        return self.coB.coderivation(L2, X)

    def p_infinity(self) -> Dict[int, Dict]:
        tables = {1: {(b,): self.P({b: ONE}) for b in range(self.r.B.dim) if self.P({b: ONE})}}
        for n in range(2, self.cap + 1):
            t = {}
            for w in self.coB.words(n):
                X = {w: ONE}
                total: Vector = {}
                for _ in range(n):
                    X = self.delta(self.K(X))
                    if not X:
                        break
                    for u, c in X.items():
                        if len(u) == 1:
                            vadd(total, self.P({u[0]: ONE}), c)
                total = {k: v for k, v in total.items() if v}
                if total:
                    t[w] = total
            tables[n] = t
        return tables


def transfer(H: HomotopyAlgebra, r: Retraction, arity_cap: Optional[int] = None) -> HomotopyAlgebra:
    """Transferred homotopy algebra on C (same family as H)."""
    cap = arity_cap or H.arity_cap
    T = _Transfer(H.to_shifted(), r, cap)
    return HomotopyAlgebra.from_shifted(r.C, H.qname, T.structure(), cap, f"H({H.name})")


def transfer_with_morphisms(H: HomotopyAlgebra, r: Retraction, arity_cap: Optional[int] = None):
    """(transferred algebra, i_∞, p_∞)."""
    cap = arity_cap or H.arity_cap
    T = _Transfer(H.to_shifted(), r, cap)
    HC = HomotopyAlgebra.from_shifted(r.C, H.qname, T.structure(), cap, f"H({H.name})")
    i_inf = InfinityMorphism(HC, H, T.i_infinity())
    p_inf = InfinityMorphism(H, HC, T.p_infinity())
    return HC, i_inf, p_inf


def i_infinity(H: HomotopyAlgebra, r: Retraction, arity_cap: Optional[int] = None) -> InfinityMorphism:
    return transfer_with_morphisms(H, r, arity_cap)[1]


def p_infinity(H: HomotopyAlgebra, r: Retraction, arity_cap: Optional[int] = None) -> InfinityMorphism:
    return transfer_with_morphisms(H, r, arity_cap)[2]


# ---------------------------------------------------------------------------
# the two ways round
# ---------------------------------------------------------------------------

_KOSZUL_DUAL_FAMILY = {"Com": "Com", "Ass": "Ass", "As": "As"}


def _qname(psi: OperadMorphism) -> str:
    name = psi.source.name
    if name not in _KOSZUL_DUAL_FAMILY:
        raise ValueError(f"no stock Koszul dual family for {name}")
    return name


def two_structures(A: PAlgebra, B: PAlgebra, r: Retraction, psi: OperadMorphism,
                   arity_cap: int = 4, M: Optional[MPsi] = None):
    """Path (1): A ⊗ B as a strict Lie (As) algebra through the Manin
    morphism, transferred along 1⊗r.  Path (2): transfer B to C as a
    (Q^!)_∞-algebra, then form A ⊗^Ψ C.  Returns both homotopy algebras on
    A ⊗ C and the data used for the ∞-morphisms."""
    qname = _qname(psi)
    M = M or MPsi(psi, arity_cap)
    Binf = strict_as_infinity(B, qname, arity_cap)
    # path (1): only ℓ_2 of A ⊗^Ψ B is non-zero, and it is m_Ψ(b) acting
    AB = tensor_structure(A, Binf, psi, M)
    r1 = r.tensor_left(A.V)
    path1, i1, p1 = transfer_with_morphisms(AB, r1, arity_cap)
    # path (2)
    Cinf, i2, p2 = transfer_with_morphisms(Binf, r, arity_cap)
    path2 = tensor_structure(A, Cinf, psi, M)
    return {"path1": path1, "path2": path2, "AB": AB, "Binf": Binf, "Cinf": Cinf,
            "i_left": i1, "p_left": p1, "i_C": i2, "p_C": p2, "M": M}


def structures_equal(H1: HomotopyAlgebra, H2: HomotopyAlgebra, max_arity: int) -> Dict[int, bool]:
    return {n: H1.bracket(n) == H2.bracket(n) for n in range(2, max_arity + 1)}


def morphism_compat(A: PAlgebra, B: PAlgebra, r: Retraction, psi: OperadMorphism,
                    arity_cap: int = 4, weight: int = 3, data=None) -> Dict[str, bool]:
    """(1⊗i)_∞ = 1 ⊗^Ψ i_∞ and (1⊗p)_∞ = 1 ⊗^Ψ p_∞ component-wise up to `weight`."""
    data = data or two_structures(A, B, r, psi, arity_cap)
    ident = {(a, a): ONE for a in range(A.V.dim)}
    M = data["M"]
    rhs_i = infinity_tensor_morphism(ident, A, A, data["i_C"], psi, data["path2"], data["AB"], M)
    rhs_p = infinity_tensor_morphism(ident, A, A, data["p_C"], psi, data["AB"], data["path2"], M)
    return {"i": data["i_left"].equals(rhs_i, weight), "p": data["p_left"].equals(rhs_p, weight)}
