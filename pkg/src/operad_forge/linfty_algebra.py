"""
Algebras as structure constants.

A strict algebra over a stock operad P is a morphism ρ: P → End_V, stored on
basis elements of P.  A homotopy algebra over Ω((S⁻¹)^c⊗Q^∨) is stored by
the images ρ(g_q) ∈ End_V of the generators; it is valid exactly when ρ
commutes with the differentials (`jacobi_defect`).  For the L∞ (Q = Com) and
A∞ (Q = Ass or As) families the same data is also available in the shifted
picture of `shifted.py`, where validity is D² = 0 on the cofree coalgebra.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .barcobar import CobarOperad, a_gen, ell, resolution_to_lie
from .exact_core import (ONE, GradedSpace, RowReducer, Vector, all_perms, desuspension_tensor_sign,
                         koszul_sign, perm_inverse, solve_in_span, tensor_space, vadd, vscale)
from .main_theorem import MPsi, OperadMorphism, _with_cap
from .operad_base import Operad
from .shifted import ShiftedCoalgebra, ShiftedMorphism, ShiftedStructure, lookup
from .smodule_operad import LIE_B, As, Ass, Com, EndOperad, Lie, _sign
from .tree_calculus import eval_tree

Hom = Vector  # {("E", out, ins): coeff}


# ---------------------------------------------------------------------------
# helpers on multilinear maps stored as ("E", out, ins) vectors
# ---------------------------------------------------------------------------

def hom_degree(key, vdegs, wdegs) -> int:
    return wdegs[key[1]] - sum(vdegs[a] for a in key[2])


def hom_act(vec: Hom, perm, vdegs) -> Hom:
    """Right action of S_n on Hom(V^{⊗n}, W), as in End_V."""
    perm = tuple(perm)
    if perm == tuple(range(len(perm))):
        return dict(vec)
    out: Hom = {}
    for (_, o, I), c in vec.items():
        J = tuple(I[perm[k]] for k in range(len(I)))
        key = ("E", o, J)
        out[key] = out.get(key, 0) + c * koszul_sign(perm, [vdegs[a] for a in J])
    return {k: v for k, v in out.items() if v}


def hom_evaluate(vec: Hom, inputs: Sequence[Vector]) -> Vector:
    """f(x_1 ⊗ … ⊗ x_n) for vectors x_i of V (no sign: f acts from the left)."""
    out: Vector = {}
    for (_, o, I), c in vec.items():
        coeff = c
        for a, x in zip(I, inputs):
            xa = x.get(a)
            if not xa:
                coeff = 0
                break
            coeff *= xa
        if coeff:
            out[o] = out.get(o, 0) + coeff
    return {k: v for k, v in out.items() if v}


def hom_postcompose(f: Dict[Tuple[int, int], Fraction], vec: Hom) -> Hom:
    """g ↦ f ∘ g for a degree-0 linear map f given as {(target, source): c}."""
    by_src: Dict[int, List[Tuple[int, Fraction]]] = {}
    for (t, s), c in f.items():
        by_src.setdefault(s, []).append((t, c))
    out: Hom = {}
    for (_, o, I), c in vec.items():
        for t, cf in by_src.get(o, ()):
            key = ("E", t, I)
            out[key] = out.get(key, 0) + c * cf
    return {k: v for k, v in out.items() if v}


def tensor_carrier(A: GradedSpace, C: GradedSpace) -> GradedSpace:
    return tensor_space(A, C)


def hom_tensor(f: Hom, g: Hom, A: GradedSpace, C: GradedSpace,
               A2: Optional[GradedSpace] = None, C2: Optional[GradedSpace] = None) -> Hom:
    """τ(f ⊗ g) ∈ Hom((A⊗C)^{⊗n}, A2⊗C2):
    (a_1⊗c_1)⊗…⊗(a_n⊗c_n) ↦ (−1)^{ε} f(a_1,…,a_n) ⊗ g(c_1,…,c_n),
    ε = Σ_{k<l}|c_k||a_l| + |g| Σ|a_l|."""
    A2 = A2 or A
    C2 = C2 or C
    ad, cd = A.degrees(), C.degrees()
    a2d, c2d = A2.degrees(), C2.degrees()
    out: Hom = {}
    for (_, o1, I), c1 in f.items():
        for (_, o2, J), c2 in g.items():
            if len(I) != len(J):
                raise ValueError("arity mismatch in tensor of operations")
            n = len(I)
            gdeg = c2d[o2] - sum(cd[b] for b in J)
            e = gdeg * sum(ad[a] for a in I)
            e += sum(cd[J[k]] * ad[I[l]] for k in range(n) for l in range(k + 1, n))
            key = ("E", o1 * C2.dim + o2, tuple(a * C.dim + b for a, b in zip(I, J)))
            out[key] = out.get(key, 0) + c1 * c2 * _sign(e)
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# strict algebras
# ---------------------------------------------------------------------------

class PAlgebra:
    """ρ: P → End_V on basis elements of P (arity ≤ arity_cap)."""

    def __init__(self, P: Operad, V: GradedSpace, rho: Dict[Hashable, Hom], arity_cap: int, name: str = "A"):
        self.P, self.V, self.arity_cap, self.name = P, V, arity_cap, name
        self.rho = {k: {kk: vv for kk, vv in v.items() if vv} for k, v in rho.items()}
        self.end = EndOperad(V, arity_cap)

    def structure(self, key) -> Hom:
        if key in self.rho:
            return self.rho[key]
        if self.P.arity(key) == 1:
            return self.end.unit()
        return {}

    def apply(self, X: Vector) -> Hom:
        out: Hom = {}
        for k, c in X.items():
            vadd(out, self.structure(k), c)
        return {k: v for k, v in out.items() if v}

    def morphism(self) -> OperadMorphism:
        return OperadMorphism(self.P, self.end, self.structure, f"ρ_{self.name}")

    def check(self, max_arity: Optional[int] = None) -> bool:
        """ρ is a morphism of dg operads up to the given arity."""
        cap = max_arity or self.arity_cap
        if not self.morphism().check(cap):
            return False
        for n in range(1, cap + 1):
            for x in self.P.basis(n):
                if self.end.d_vec(self.structure(x)) != self.apply(self.P.d(x)):
                    return False
        return True

    def operation(self, key, *inputs: Vector) -> Vector:
        return hom_evaluate(self.structure(key), inputs)

    @classmethod
    def from_generators(cls, P: Operad, V: GradedSpace, gens: Dict[Hashable, Hom],
                        arity_cap: int, name: str = "A", check: bool = True) -> "PAlgebra":
        """Extend values on arity-2 generators to all of P: every basis
        element is solved for inside the span of the composites g^σ ∘_i y
        whose images are already known."""
        end = EndOperad(V, arity_cap)
        rho: Dict[Hashable, Hom] = {}
        known: List[Tuple[Vector, Hom]] = []
        for g, val in gens.items():
            perms = all_perms(2) if P.symmetric else [(0, 1)]
            for s in perms:
                known.append((P.act(g, s), end.act_vec(val, s) if P.symmetric else dict(val)))
        _solve_arity(P, 2, known, rho)
        for n in range(3, arity_cap + 1):
            cands: List[Tuple[Vector, Hom]] = []
            for g, val in gens.items():
                for y in P.basis(n - 1):
                    for i in (1, 2):
                        cands.append((P.compose(g, i, y), end.compose_vec(val, i, rho[y])))
            if P.symmetric:
                cands = [(P.act_vec(X, s), end.act_vec(R, s)) for X, R in cands for s in all_perms(n)]
            _solve_arity(P, n, cands, rho)
        alg = cls(P, V, rho, arity_cap, name)
        if check and not alg.check(min(arity_cap, 3)):
            raise ValueError(f"{name}: generator values do not define a {P.name}-algebra")
        return alg


def _solve_arity(P: Operad, n: int, cands: List[Tuple[Vector, Hom]], rho: Dict[Hashable, Hom]) -> None:
    rr = RowReducer(order=repr)
    chosen: List[Tuple[Vector, Hom]] = []
    dim = len(P.basis(n))
    for X, R in cands:
        if X and rr.add(X):
            chosen.append((X, R))
            if rr.rank == dim:
                break
    if rr.rank < dim:
        raise ValueError(f"generators do not span {P.name}({n})")
    for x in P.basis(n):
        coeffs = solve_in_span([X for X, _ in chosen], {x: ONE})
        val: Hom = {}
        for c, (_, R) in zip(coeffs, chosen):
            if c:
                vadd(val, R, c)
        rho[x] = {k: v for k, v in val.items() if v}


def stock_operad(name: str, cap: int) -> Operad:
    return {"com": Com, "lie": Lie, "ass": Ass, "as": As}[name.lower()](cap)


def generator_key(P: Operad):
    return {"Com": ("mu", 2), "Lie": LIE_B, "Ass": ("m", (0, 1)), "As": ("a", 2)}[P.name]


def binary_algebra(P: Operad, V: GradedSpace, table: Dict[Tuple[int, int], Vector], arity_cap: int,
                   name: str = "A", check: bool = True) -> PAlgebra:
    """A strict algebra from its binary product table {(i, j): x_i·x_j}."""
    val: Hom = {}
    for (i, j), vec in table.items():
        for o, c in vec.items():
            if c:
                val[("E", o, (i, j))] = Fraction(c)
    return PAlgebra.from_generators(P, V, {generator_key(P): val}, arity_cap, name, check)


# ---------------------------------------------------------------------------
# homotopy algebras over Ω((S⁻¹)^c ⊗ Q^∨)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _cobar(qname: str, cap: int) -> CobarOperad:
    Q = stock_operad(qname, cap)
    return CobarOperad(Q, cap, max(cap - 1, 1))


FAMILY = {"Com": "sym", "Ass": "ass", "As": "ns"}


def principal_label(qname: str, n: int):
    if qname == "Com":
        return ell(n)
    if qname == "As":
        return a_gen(n)
    return ("g", ("m", tuple(range(n))))


# L_n = κ_n · s ∘ ρ(g) ∘ (s^{-1})^{⊗n}.  With L_1 = −s d s^{-1} the uniform
# choice κ_n = −1 is the one for which ρ commuting with the differentials and
# D² = 0 on the cofree coalgebra are the same condition (pinned by tests on
# non-minimal transferred structures).
def kappa(n: int) -> int:
    return -1


def kappa_morphism(n: int) -> int:
    return -1


class HomotopyAlgebra:
    """ρ(g_q) ∈ End_V for the generators of Ω((S⁻¹)^c⊗Q^∨), arities 2..cap;
    the differential of V plays the role of the arity-1 part."""

    def __init__(self, V: GradedSpace, qname: str, rho: Dict[Hashable, Hom], arity_cap: int,
                 name: str = "H"):
        self.V, self.qname, self.arity_cap, self.name = V, qname, arity_cap, name
        self.rho = {k: {kk: vv for kk, vv in v.items() if vv} for k, v in rho.items()}
        self.end = EndOperad(V, arity_cap)

    @property
    def omega(self) -> CobarOperad:
        return _cobar(self.qname.lower(), self.arity_cap)

    @property
    def symmetric(self) -> bool:
        return self.qname == "Com"

    def structure(self, lab) -> Hom:
        return self.rho.get(lab, {})

    def bracket(self, n: int) -> Hom:
        return self.structure(principal_label(self.qname, n))

    # validity -----------------------------------------------------------
    def jacobi_defect(self, n: int) -> Dict[Hashable, Hom]:
        """Generators g of arity n with d_End ρ(g) ≠ ρ(d g)."""
        Om = self.omega
        bad = {}
        for lab in Om.G.basis(n):
            lhs = self.end.d_vec(self.structure(lab))
            rhs: Hom = {}
            for T, c in Om._gen_d(lab).items():
                vadd(rhs, eval_tree(T, self.end, self.structure, Om.G.degree), c)
            diff = dict(lhs)
            vadd(diff, rhs, -1)
            diff = {k: v for k, v in diff.items() if v}
            if diff:
                bad[lab] = diff
        return bad

    def is_valid(self, max_arity: Optional[int] = None) -> bool:
        return all(not self.jacobi_defect(n) for n in range(2, (max_arity or self.arity_cap) + 1))

    # shifted picture ------------------------------------------------------
    def coalgebra(self) -> ShiftedCoalgebra:
        return ShiftedCoalgebra(self.V.degrees(), symmetric=self.symmetric)

    def to_shifted(self) -> ShiftedStructure:
        co = self.coalgebra()
        tables: Dict[int, Dict] = {1: differential_table(self.V)}
        vd = self.V.degrees()
        for n in range(2, self.arity_cap + 1):
            t: Dict = {}
            for (_, o, I), c in self.bracket(n).items():
                s, w = co.normal_word(I)
                if w != I:
                    continue
                t.setdefault(w, {})
                t[w][o] = t[w].get(o, 0) + c * kappa(n) * desuspension_tensor_sign([vd[a] for a in I])
            tables[n] = t
        return ShiftedStructure(co, tables)

    def shifted_square_defect(self, max_weight: Optional[int] = None):
        """Non-zero entries of D² on the cofree coalgebra (generalized Jacobi)."""
        return self.to_shifted().square_defect(max_weight or self.arity_cap)

    @classmethod
    def from_shifted(cls, V: GradedSpace, qname: str, S: ShiftedStructure, arity_cap: int,
                     name: str = "H") -> "HomotopyAlgebra":
        vd = V.degrees()
        co = S.co
        rho: Dict[Hashable, Hom] = {}
        for n in range(2, arity_cap + 1):
            f = lookup(S.tables.get(n, {}), co)
            val: Hom = {}
            for u in product(range(V.dim), repeat=n):
                out = f(u)
                if not out:
                    continue
                sg = kappa(n) * desuspension_tensor_sign([vd[a] for a in u])
                for o, c in out.items():
                    key = ("E", o, u)
                    val[key] = val.get(key, 0) + c * sg
            rho[principal_label(qname, n)] = {k: v for k, v in val.items() if v}
        alg = cls(V, qname, rho, arity_cap, name)
        alg._fill_by_symmetry()
        return alg

    def _fill_by_symmetry(self) -> None:
        """Derive ρ on all generators from the principal ones (Ass case)."""
        if self.qname != "Ass":
            return
        Om = self.omega
        for n in range(2, self.arity_cap + 1):
            base_lab = principal_label("Ass", n)
            base = self.rho.get(base_lab, {})
            for tau in all_perms(n):
                img = Om.G.act(base_lab, tau)
                (lab, c), = img.items()
                if lab not in self.rho:
                    self.rho[lab] = vscale(self.end.act_vec(base, tau), 1 / Fraction(c))

    def mc_residual(self, x: Vector) -> Vector:
        """dx + Σ_{n≥2} (1/n!) ℓ_n(x,…,x), truncated at the arity cap; without
        factorials in the non-symmetric families."""
        out = self.V.d(x)
        for n in range(2, self.arity_cap + 1):
            val = hom_evaluate(self.bracket(n), [x] * n)
            coeff = Fraction(1, factorial(n)) if self.symmetric else ONE
            vadd(out, val, coeff)
        return {k: v for k, v in out.items() if v}

    def dump(self) -> dict:
        return structure_dump(self.V, {n: self.bracket(n) for n in range(2, self.arity_cap + 1)})


def differential_table(V: GradedSpace) -> Dict:
    """L_1(sx) = −s(dx)."""
    t: Dict = {}
    for (tgt, src), c in V.d_entries.items():
        t.setdefault((src,), {})[tgt] = t.get((src,), {}).get(tgt, 0) - c
    return t


def mc_residual(g: HomotopyAlgebra, x: Vector) -> Vector:
    if not g.symmetric:
        raise ValueError("use mc_residual_ns for non-symmetric algebras")
    return g.mc_residual(x)


def mc_residual_ns(g: HomotopyAlgebra, x: Vector) -> Vector:
    out = g.V.d(x)
    for n in range(2, g.arity_cap + 1):
        vadd(out, hom_evaluate(g.bracket(n), [x] * n))
    return {k: v for k, v in out.items() if v}


def structure_dump(V: GradedSpace, ops: Dict[int, Hom]) -> dict:
    """Per arity, sorted (input basis tuple, output basis element, coefficient)."""
    out = {"basis": [[str(l), d] for l, d in V.basis], "operations": {}}
    for n, op in sorted(ops.items()):
        rows = sorted(((list(k[2]), k[1], str(c)) for k, c in op.items() if c))
        out["operations"][str(n)] = rows
    return out


def dump_json(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False)


# ---------------------------------------------------------------------------
# pull-backs and the Ψ-tensor product
# ---------------------------------------------------------------------------

def pull_back_structure(m: OperadMorphism, alg: PAlgebra) -> PAlgebra:
    """ρ_new = ρ ∘ m for a morphism of strict operads."""
    if m.target.name != alg.P.name:
        raise ValueError("target of the morphism is not the operad of the algebra")
    rho = {}
    for n in range(1, alg.arity_cap + 1):
        for x in m.source.basis(n):
            rho[x] = alg.apply(m(x))
    out = PAlgebra(m.source, alg.V, rho, alg.arity_cap, alg.name)
    if not out.check(min(alg.arity_cap, 3)):
        raise ValueError("pull-back is not an algebra structure")
    return out


def linfty_from_lie(B: PAlgebra, arity_cap: Optional[int] = None) -> HomotopyAlgebra:
    """Pull a dg Lie algebra back along L∞ → Lie: ℓ_2 = bracket, ℓ_{≥3} = 0."""
    cap = arity_cap or B.arity_cap
    Om = _cobar("com", cap)
    f = resolution_to_lie(Om, Lie(cap))
    rho = {}
    for n in range(2, cap + 1):
        lab = ell(n)
        from .tree_calculus import corolla
        rho[lab] = B.apply(f({corolla(lab, n): ONE}))
    return HomotopyAlgebra(B.V, "Com", rho, cap, B.name)


def strict_as_infinity(B: PAlgebra, qname: str, arity_cap: Optional[int] = None) -> HomotopyAlgebra:
    """A strict Q^!-algebra seen as a (Q^!)_∞-algebra over Ω((S⁻¹)^c⊗Q^∨),
    for the stock Koszul pairs (Q, Q^!) = (Com, Lie), (Ass, Ass), (As, As):
    g_q ↦ ρ(κ(q)) in arity 2, zero above."""
    cap = arity_cap or B.arity_cap
    rho: Dict[Hashable, Hom] = {}
    if qname == "Com":
        rho[ell(2)] = B.structure(LIE_B)
    elif qname == "As":
        rho[a_gen(2)] = B.structure(("a", 2))
    elif qname == "Ass":
        # g_{m_w} ↦ sgn · m_w keeps the sign-twisted equivariance
        rho[("g", ("m", (0, 1)))] = B.structure(("m", (0, 1)))
        rho[("g", ("m", (1, 0)))] = vscale(B.structure(("m", (1, 0))), -1)
    else:
        raise ValueError(qname)
    return HomotopyAlgebra(B.V, qname, rho, cap, B.name)


def tensor_structure(A: PAlgebra, C: HomotopyAlgebra, psi: OperadMorphism,
                     M: Optional[MPsi] = None) -> HomotopyAlgebra:
    """A ⊗^Ψ C: pull the P ⊗_H Ω-algebra structure of A ⊗ C back along M_Ψ."""
    cap = min(A.arity_cap, C.arity_cap)
    M = M or MPsi(psi, cap)
    V = tensor_carrier(A.V, C.V)
    qname = "As" if not psi.source.symmetric else "Com"
    rho: Dict[Hashable, Hom] = {}
    for n in range(2, cap + 1):
        val: Hom = {}
        for (p, T), c in M.generator_image(n).items():
            g = C.structure(T[0])
            if not g:
                continue
            vadd(val, hom_tensor(A.structure(p), g, A.V, C.V), c)
        rho[M.gen_label(n)] = {k: v for k, v in val.items() if v}
    return HomotopyAlgebra(V, qname, rho, cap, f"{A.name}⊗{C.name}")


def strict_tensor_algebra(A: PAlgebra, B: PAlgebra, image_of_generator: Vector, target_operad: Operad,
                          target_gen, arity_cap: int) -> PAlgebra:
    """A ⊗ B as an algebra over `target_operad` whose generator acts through
    the Hadamard element image_of_generator = Σ c (p, x) with x ∈ B's operad."""
    val: Hom = {}
    for (p, x), c in image_of_generator.items():
        vadd(val, hom_tensor(A.structure(p), B.structure(x), A.V, B.V), c)
    V = tensor_carrier(A.V, B.V)
    return PAlgebra.from_generators(target_operad, V, {target_gen: val}, arity_cap, f"{A.name}⊗{B.name}")


# ---------------------------------------------------------------------------
# ∞-morphisms
# ---------------------------------------------------------------------------

class InfinityMorphism:
    """An ∞-morphism between homotopy algebras of one family, stored by its
    shifted components F_n: (sV)^{⊗n} → sW (degree 0)."""

    def __init__(self, source: HomotopyAlgebra, target: HomotopyAlgebra, tables: Dict[int, Dict]):
        self.source, self.target = source, target
        self.tables = tables

    def shifted(self) -> ShiftedMorphism:
        return ShiftedMorphism(self.source.to_shifted(), self.target.to_shifted(), self.tables)

    def coalgebra_defect(self, max_weight: int):
        return self.shifted().commutation_defect(max_weight)

    def is_coalgebra_map(self, max_weight: int) -> bool:
        return not self.coalgebra_defect(max_weight)

    def compose_after(self, other: "InfinityMorphism", max_weight: int) -> "InfinityMorphism":
        """self ∘ other."""
        m = other.shifted().then(self.shifted(), max_weight)
        return InfinityMorphism(other.source, self.target, m.tables)

    def component(self, n: int) -> Hom:
        """Operadic component g_n ∈ Hom(V^{⊗n}, W) of degree n−1 for the
        principal cooperad element."""
        vd = self.source.V.degrees()
        co = self.source.coalgebra()
        f = lookup(self.tables.get(n, {}), co)
        val: Hom = {}
        for u in product(range(self.source.V.dim), repeat=n):
            out = f(u)
            if not out:
                continue
            sg = kappa_morphism(n) * desuspension_tensor_sign([vd[a] for a in u])
            for o, c in out.items():
                key = ("E", o, u)
                val[key] = val.get(key, 0) + c * sg
        return {k: v for k, v in val.items() if v}

    def full_component(self, q) -> Hom:
        """g(q; –) for an arbitrary basis element q of Q(n)."""
        qn = self.source.qname
        if qn != "Ass":
            return self.component(_arity_of_q(q))
        n = len(q[1])
        Om = self.source.omega
        base_lab = principal_label("Ass", n)
        for tau in all_perms(n):
            (lab, c), = Om.G.act(base_lab, tau).items()
            if lab == ("g", q):
                return vscale(hom_act(self.component(n), tau, self.source.V.degrees()), 1 / Fraction(c))
        raise KeyError(q)

    @classmethod
    def from_components(cls, source: HomotopyAlgebra, target: HomotopyAlgebra,
                        comps: Dict[int, Hom]) -> "InfinityMorphism":
        co = source.coalgebra()
        vd = source.V.degrees()
        tables: Dict[int, Dict] = {}
        for n, op in comps.items():
            t: Dict = {}
            for (_, o, I), c in op.items():
                s, w = co.normal_word(I)
                if w != I:
                    continue
                t.setdefault(w, {})
                t[w][o] = t[w].get(o, 0) + c * kappa_morphism(n) * desuspension_tensor_sign([vd[a] for a in I])
            tables[n] = t
        return cls(source, target, tables)

    def equals(self, other: "InfinityMorphism", max_weight: int) -> bool:
        return self.shifted().equals(other.shifted(), max_weight)


def _arity_of_q(q) -> int:
    if q[0] == "mu" or q[0] == "a":
        return q[1]
    return len(q[1])


def strict_morphism(source: HomotopyAlgebra, target: HomotopyAlgebra,
                    f: Dict[Tuple[int, int], Fraction]) -> InfinityMorphism:
    """A degree-0 chain map as an ∞-morphism (only F_1 non-zero)."""
    t = {}
    for (tgt, src), c in f.items():
        if c:
            t.setdefault((src,), {})[tgt] = Fraction(c)
    return InfinityMorphism(source, target, {1: t})


def identity_infinity(H: HomotopyAlgebra) -> InfinityMorphism:
    return strict_morphism(H, H, {(a, a): ONE for a in range(H.V.dim)})


def infinity_tensor_morphism(f: Dict[Tuple[int, int], Fraction], A: PAlgebra, A2: PAlgebra,
                             g: InfinityMorphism, psi: OperadMorphism,
                             source: HomotopyAlgebra, target: HomotopyAlgebra,
                             M: Optional[MPsi] = None) -> InfinityMorphism:
    """f ⊗^Ψ g between A ⊗^Ψ C and A2 ⊗^Ψ C2: the component for ℓ_n is
    Σ (−1)^{(n−1)|p|} c · τ(f ∘ ρ_A(p) ⊗ g(q)) over the terms c·Ψ(q)⊗g_q
    of M_Ψ(ℓ_n) (whose own sign (−1)^{n|p|} is divided out), and f ⊗ g_1
    in arity one."""
    cap = min(source.arity_cap, max(g.tables) if g.tables else 1)
    M = M or MPsi(psi, source.arity_cap)
    C, C2 = g.source.V, g.target.V
    comps: Dict[int, Hom] = {}
    fmat = {k: Fraction(v) for k, v in f.items() if v}
    g1 = g.component(1)
    unitA = {("E", a, (a,)): ONE for a in range(A.V.dim)}
    comps[1] = hom_tensor(hom_postcompose(fmat, unitA), g1, A.V, C, A2.V, C2)
    for n in range(2, cap + 1):
        val: Hom = {}
        for (p, T), c in M.generator_image(n).items():
            q = T[0][1]
            gq = g.full_component(q)
            if not gq:
                continue
            pdeg = A.P.degree(p)
            coeff = c * _sign(n * pdeg) * _sign((n - 1) * pdeg)
            vadd(val, hom_tensor(hom_postcompose(fmat, A.structure(p)), gq, A.V, C, A2.V, C2), coeff)
        comps[n] = {k: v for k, v in val.items() if v}
    return InfinityMorphism.from_components(source, target, comps)


# ---------------------------------------------------------------------------
# coalgebras and hom^Ψ(D, A)
# ---------------------------------------------------------------------------

class CCoalgebra:
    """A finite-dimensional coalgebra over B(S⊗Q) through weight one:
    delta[n][o] lists (q, inputs, coeff) for the terms
    coeff · s(S_n⊗q) ⊗ d_{inputs_1} ⊗ … ⊗ d_{inputs_n} of Δ(d_o)."""

    def __init__(self, D: GradedSpace, qname: str, delta: Dict[int, Dict[int, List]], conilpotent: bool = True):
        self.D, self.qname, self.delta, self.conilpotent = D, qname, delta, conilpotent


def dual_coalgebra(C: HomotopyAlgebra) -> CCoalgebra:
    """D = C^∨ (degrees negated, differential transposed), with Δ the
    transpose of the generating operations: the pairing of g_q with
    s(S_n⊗q) is (−1)^{n−1+n(n−1)/2} and (C^{⊗n})^∨ ≅ (C^∨)^{⊗n} carries
    the Koszul sign."""
    from .main_theorem import generator_sign
    cd = C.V.degrees()
    dd = [-x for x in cd]
    dmat = {}
    for (t, s), c in C.V.d_entries.items():
        # (d φ)(c) = (−1)^{|φ|} φ(d c): the sign that makes the arity-one
        # pairing agree with the one used for Δ
        dmat[(s, t)] = c * _sign(dd[t])
    D = GradedSpace(f"{C.V.name}^∨", [(("dual", l), -d) for l, d in C.V.basis], dmat, check=False)
    delta: Dict[int, Dict[int, List]] = {}
    Om = C.omega
    for n in range(2, C.arity_cap + 1):
        table: Dict[int, List] = {}
        for lab in Om.G.basis(n):
            q = lab[1]
            for (_, o, I), c in C.structure(lab).items():
                e = sum(dd[I[k]] * cd[I[j]] for j in range(n) for k in range(j + 1, n))
                table.setdefault(o, []).append((q, I, c * generator_sign(n) * _sign(e)))
        delta[n] = table
    return CCoalgebra(D, C.qname, delta)


def hom_carrier(D: GradedSpace, A: GradedSpace) -> GradedSpace:
    """hom(D, A) with basis f_{k,j}: d_j ↦ a_k, indexed k·dim D + j."""
    basis = [((("hom", A.label(k), D.label(j))), A.degree(k) - D.degree(j))
             for k in range(A.dim) for j in range(D.dim)]
    d: Dict = {}
    for k in range(A.dim):
        for j in range(D.dim):
            src = k * D.dim + j
            deg = A.degree(k) - D.degree(j)
            for (t, s), c in A.d_entries.items():
                if s == k:
                    d[(t * D.dim + j, src)] = d.get((t * D.dim + j, src), 0) + c
            # −(−1)^{|f|} f ∘ d_D
            for (t, s), c in D.d_entries.items():
                if t == j:
                    key = (k * D.dim + s, src)
                    d[key] = d.get(key, 0) - _sign(deg) * c
    return GradedSpace(f"hom({D.name},{A.name})", basis, d, check=False)


def hom_structure(D: CCoalgebra, A: PAlgebra, psi: OperadMorphism, arity_cap: Optional[int] = None) -> HomotopyAlgebra:
    """hom^Ψ(D, A): ℓ_n(f_1,…,f_n) = γ_A ∘ (M̄_Ψ(ℓ_n) ⊗ f_1 ⊗ … ⊗ f_n) ∘ Δ_D,
    with M̄_Ψ(ℓ_n)(s(S_n⊗q)) = (−1)^{n−1+n(n−1)/2} Ψ(q)."""
    from .main_theorem import generator_sign
    cap = arity_cap or A.arity_cap
    V = hom_carrier(D.D, A.V)
    Dd, Ad = D.D.degrees(), A.V.degrees()
    dimD = D.D.dim
    rho: Dict[Hashable, Hom] = {}
    Qop = psi.source
    for n in range(2, cap + 1):
        val: Hom = {}
        for o, terms in D.delta.get(n, {}).items():
            for q, I, c in terms:
                xdeg = 2 - n + Qop.degree(q)
                op = vscale(psi(q), generator_sign(n))
                for p, cp in op.items():
                    for (_, ak, J), ca in A.structure(p).items():
                        # inputs f_j = f_{J_j, I_j}: d_{I_j} ↦ a_{J_j}
                        fdeg = [Ad[J[j]] - Dd[I[j]] for j in range(n)]
                        e = sum(fdeg[j] * (xdeg + sum(Dd[I[k]] for k in range(j))) for j in range(n))
                        key = ("E", ak * dimD + o, tuple(J[j] * dimD + I[j] for j in range(n)))
                        val[key] = val.get(key, 0) + c * cp * ca * _sign(e)
        lab = principal_label("As" if not Qop.symmetric else "Com", n)
        rho[lab] = {k: v for k, v in val.items() if v}
    qn = "As" if not Qop.symmetric else "Com"
    return HomotopyAlgebra(V, qn, rho, cap, f"hom({D.D.name},{A.name})")


def tensor_to_hom(A: GradedSpace, C: GradedSpace, twist: bool = False) -> Dict[Tuple[int, int], Fraction]:
    """A ⊗ C → hom(C^∨, A), a_k ⊗ c_j ↦ f_{k,j}.  `twist` inserts the
    Koszul sign (−1)^{|a_k||c_j|}, which does not intertwine the brackets."""
    out = {}
    for k in range(A.dim):
        for j in range(C.dim):
            s = _sign(A.degree(k) * C.degree(j)) if twist else 1
            out[(k * C.dim + j, k * C.dim + j)] = Fraction(s)
    return out


def conjugate_structure(H: HomotopyAlgebra, iso: Dict[Tuple[int, int], Fraction], V2: GradedSpace) -> Dict[int, Hom]:
    """Brackets of H transported along a diagonal ±1 isomorphism."""
    diag = {s: c for (t, s), c in iso.items()}
    out = {}
    for n in range(2, H.arity_cap + 1):
        val: Hom = {}
        for (_, o, I), c in H.bracket(n).items():
            coeff = c * diag[o]
            for a in I:
                coeff *= diag[a]
            val[("E", o, I)] = coeff
        out[n] = val
    return out


def hom_tensor_iso_holds(A: PAlgebra, C: HomotopyAlgebra, psi: OperadMorphism,
                         twist: bool = False) -> Dict[int, bool]:
    """hom^Ψ(C^∨, A) ≅ A ⊗^Ψ C bracket by bracket."""
    T = tensor_structure(A, C, psi)
    Hm = hom_structure(dual_coalgebra(C), A, psi, T.arity_cap)
    iso = tensor_to_hom(A.V, C.V, twist)
    moved = conjugate_structure(T, iso, Hm.V)
    out = {n: moved[n] == Hm.bracket(n) for n in range(2, T.arity_cap + 1)}
    diag = {s: c for (t, s), c in iso.items()}
    out[1] = {k: c * diag[k[0]] * diag[k[1]] for k, c in T.V.d_entries.items() if c} == \
        {k: c for k, c in Hm.V.d_entries.items() if c}
    return dict(sorted(out.items()))


# ---------------------------------------------------------------------------
# gauge transport: random ∞-isomorphisms
# ---------------------------------------------------------------------------

def _weight_one(G: Dict[int, Callable], X: Dict[Tuple[int, ...], Fraction]) -> Vector:
    out: Vector = {}
    for u, c in X.items():
        if len(u) in G:
            vadd(out, G[len(u)](u), c)
    return {k: v for k, v in out.items() if v}


def gauge_transform(C: HomotopyAlgebra, scale: Sequence[Fraction], tables: Dict[int, Dict],
                    name: str = "C'") -> InfinityMorphism:
    """Transport C along the coalgebra automorphism G̃ whose linear part
    multiplies basis vector a by scale[a] and whose higher components are
    `tables` (shifted convention, normal words).  Returns G: C ⇝ C' with
    D' = G̃ D G̃⁻¹, so G is an ∞-isomorphism by construction."""
    cap = C.arity_cap
    co = C.coalgebra()
    S = C.to_shifted()
    G_tabs = {1: {(a,): {a: Fraction(scale[a])} for a in range(C.V.dim)}}
    G_tabs.update({n: t for n, t in tables.items() if n >= 2})
    G = {n: lookup(t, co) for n, t in G_tabs.items()}
    # inverse components, weight by weight
    F_tabs: Dict[int, Dict] = {1: {(a,): {a: 1 / Fraction(scale[a])} for a in range(C.V.dim)}}
    for n in range(2, cap + 1):
        Fn = {m: lookup(t, co) for m, t in F_tabs.items()}
        t: Dict = {}
        for w in co.words(n):
            rest = _weight_one(G, co.coalgebra_map(co, Fn, {w: ONE}))
            val = {a: -c / Fraction(scale[a]) for a, c in rest.items() if c}
            if val:
                t[w] = val
        F_tabs[n] = t
    F = {n: lookup(t, co) for n, t in F_tabs.items()}
    Lf = S.funcs()
    new: Dict[int, Dict] = {}
    for n in range(1, cap + 1):
        t = {}
        for w in co.words(n):
            val = _weight_one(G, co.coderivation(Lf, co.coalgebra_map(co, F, {w: ONE})))
            if val:
                t[w] = val
        new[n] = t
    d = {}
    for (a,), val in new[1].items():
        for b, c in val.items():
            d[(b, a)] = -c
    V2 = GradedSpace(name, list(C.V.basis), d, check=False)
    C2 = HomotopyAlgebra.from_shifted(V2, C.qname, ShiftedStructure(co, new), cap, name)
    return InfinityMorphism(C, C2, G_tabs)


def random_gauge(C: HomotopyAlgebra, rng, density: float = 0.5, name: str = "C'") -> InfinityMorphism:
    """A random ∞-isomorphism out of C (degree-preserving components)."""
    co = C.coalgebra()
    vd = C.V.degrees()
    pick = lambda: Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    scale = []
    for _ in range(C.V.dim):
        s = pick()
        scale.append(s if s else ONE)
    tables: Dict[int, Dict] = {}
    for n in range(2, C.arity_cap + 1):
        t: Dict = {}
        for w in co.words(n):
            wdeg = co.word_degree(w)
            for o in range(C.V.dim):
                if vd[o] + 1 == wdeg and rng.random() < density:
                    c = pick()
                    if c:
                        t.setdefault(w, {})[o] = c
        tables[n] = t
    return gauge_transform(C, scale, tables, name)


# ---------------------------------------------------------------------------
# convolution algebras hom(D, A) over hom(C, P)
# ---------------------------------------------------------------------------

def dual_of_algebra(B: PAlgebra) -> CCoalgebra:
    """B^∨ as a coalgebra over the dual cooperad B.P^∨: Δ(n) is the
    transpose of every operation, written as the full invariant sum.  Keys
    q in the terms stand for the dual basis vectors q^∨."""
    bd = B.V.degrees()
    dd = [-x for x in bd]
    dmat = {(s, t): c * _sign(dd[t]) for (t, s), c in B.V.d_entries.items()}
    D = GradedSpace(f"{B.V.name}^∨", [(("dual", l), -d) for l, d in B.V.basis], dmat, check=False)
    delta: Dict[int, Dict[int, List]] = {}
    for n in range(1, B.arity_cap + 1):
        table: Dict[int, List] = {}
        for q in B.P.basis(n):
            for (_, o, I), c in B.structure(q).items():
                e = sum(dd[I[k]] * bd[I[j]] for j in range(n) for k in range(j + 1, n))
                table.setdefault(o, []).append((q, I, c * _sign(e)))
        delta[n] = table
    return CCoalgebra(D, B.P.name, delta)


def convolution_algebra_structure(D: CCoalgebra, A: PAlgebra, Q: Operad,
                                  arity_cap: Optional[int] = None) -> PAlgebra:
    """hom(D, A) as an algebra over the convolution operad hom(Q^∨, A.P),
    for a coalgebra D over Q^∨:

        γ(f; φ_1, …, φ_n)(d) = Σ ± γ_A(f(c); φ_1(d_1), …, φ_n(d_n))

    summed over the terms c ⊗ d_1 ⊗ … ⊗ d_n of Δ_D(n)(d) as stored (the
    invariant itself, no averaging)."""
    from .smodule_operad import ConvolutionOperad, DualCooperad
    cap = arity_cap or A.arity_cap
    conv = ConvolutionOperad(DualCooperad(Q), A.P)
    V = hom_carrier(D.D, A.V)
    Dd, Ad = D.D.degrees(), A.V.degrees()
    dimD = D.D.dim
    rho: Dict[Hashable, Hom] = {}
    for n in range(1, cap + 1):
        terms = D.delta.get(n, {})
        for key in conv.basis(n):
            _, c, p = key
            val: Hom = {}
            pa = A.structure(p)
            if not pa:
                continue
            cdeg = -Q.degree(c)
            for o, lst in terms.items():
                for q, J, coeff in lst:
                    if q != c:
                        continue
                    for (_, ko, K), ca in pa.items():
                        sign, pre = 1, 0
                        for i in range(n):
                            fdeg = Ad[K[i]] - Dd[J[i]]
                            sign *= _sign(fdeg * (cdeg + pre))
                            pre += Dd[J[i]]
                        ins = tuple(K[i] * dimD + J[i] for i in range(n))
                        k2 = ("E", ko * dimD + o, ins)
                        val[k2] = val.get(k2, 0) + coeff * ca * sign
            val = {k: v for k, v in val.items() if v}
            if val:
                rho[key] = val
    return PAlgebra(conv, V, rho, cap, f"hom({D.D.name},{A.name})")
