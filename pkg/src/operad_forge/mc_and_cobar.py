"""
Twisting morphisms relative to an operadic twisting morphism, the complete
cobar construction, Maurer–Cartan elements of hom^Ψ(D, A) and A ⊗^Ψ C, and
the deformation complex of morphisms of algebras.

"Complete" is realised by nilpotent filtrations (F_N = 0), so every limit is
a finite sum.  The free algebra on V truncated at depth N, the relative bar
construction B_π X and the complete cobar algebra are all built on one
normal form for M(n) ⊗_{S_n} V^{⊗n}.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import factorial
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from .exact_core import ONE, GradedSpace, RowReducer, Vector, all_perms, perm_inverse, vadd, vscale
from .linfty_algebra import (CCoalgebra, HomotopyAlgebra, PAlgebra, binary_algebra, dual_coalgebra,
                             hom_structure, tensor_structure, tensor_to_hom)
from .main_theorem import OperadMorphism
from .operad_base import Operad
from .smodule_operad import _sign

Word = Tuple[int, ...]


def _sort_perm(word: Sequence[int]) -> Tuple[int, ...]:
    """π with (π·w)_i = w_{π⁻¹(i)} sorted (stable)."""
    order = sorted(range(len(word)), key=lambda i: (word[i], i))
    # π⁻¹(i) = order[i]
    return perm_inverse(tuple(order))


def _reorder_sign(word: Sequence[int], pinv: Sequence[int], degs: Sequence[int]) -> int:
    """Koszul sign of w ↦ (w_{π⁻¹(0)}, w_{π⁻¹(1)}, …)."""
    sign = 1
    for a in range(len(pinv)):
        for b in range(a + 1, len(pinv)):
            if pinv[a] > pinv[b] and degs[word[pinv[a]]] % 2 and degs[word[pinv[b]]] % 2:
                sign = -sign
    return sign


# ---------------------------------------------------------------------------
# M(n) ⊗_{S_n} V^{⊗n}
# ---------------------------------------------------------------------------

class CoinvariantTensor:
    """Normal form for classes [m ⊗ w] with m^σ(w) = ±m(σ·w).

    `M` provides basis(n), degree(key) and act_vec(vec, perm) (symmetric
    case).  Words are tuples of basis indices of V.  A class is reduced to a
    sorted word u and an element of M(n) modulo the relations m^τ − ε m for
    τ in the stabiliser of u."""

    def __init__(self, M, V: GradedSpace, arities: Sequence[int], symmetric: bool,
                 basis_of: Optional[Callable[[int], List[Hashable]]] = None):
        self.M, self.V, self.symmetric = M, V, symmetric
        self.vdeg = V.degrees()
        self._basis_of = basis_of or M.basis
        self._quot: Dict[Word, Tuple[RowReducer, List[Hashable]]] = {}
        self.basis: List[Tuple[Hashable, Word]] = []
        self.index: Dict[Tuple[Hashable, Word], int] = {}
        for n in arities:
            words = combinations_with_replacement(range(V.dim), n) if symmetric \
                else product(range(V.dim), repeat=n)
            for u in words:
                _, free = self._quotient(tuple(u))
                for m in free:
                    self.index[(m, tuple(u))] = len(self.basis)
                    self.basis.append((m, tuple(u)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def degree(self, i: int) -> int:
        m, u = self.basis[i]
        return self.M.degree(m) + sum(self.vdeg[a] for a in u)

    def degrees(self) -> List[int]:
        return [self.degree(i) for i in range(self.dim)]

    def _quotient(self, u: Word):
        got = self._quot.get(u)
        if got is not None:
            return got
        n = len(u)
        keys = self._basis_of(n)
        rr = RowReducer(order=lambda k, pos={k: i for i, k in enumerate(keys)}: pos.get(k, -1))
        if self.symmetric:
            for i in range(n - 1):
                if u[i] != u[i + 1]:
                    continue
                tau = list(range(n))
                tau[i], tau[i + 1] = i + 1, i
                eps = -1 if self.vdeg[u[i]] % 2 else 1
                for m in keys:
                    rel = self.M.act_vec({m: ONE}, tuple(tau))
                    rel = dict(rel)
                    vadd(rel, {m: ONE}, -eps)
                    rel = {k: v for k, v in rel.items() if v}
                    if rel:
                        rr.add(rel)
        free = [m for m in keys if m not in rr.rows]
        self._quot[u] = (rr, free)
        return rr, free

    def normal_form(self, vec: Dict[Tuple[Hashable, Word], Fraction]) -> Vector:
        """{(m, word): c} with arbitrary words → {basis index: c}."""
        out: Vector = {}
        for (m, w), c in vec.items():
            if not c:
                continue
            w = tuple(w)
            mv: Vector = {m: Fraction(c)}
            if self.symmetric:
                pi = _sort_perm(w)
                pinv = perm_inverse(pi)
                u = tuple(w[pinv[i]] for i in range(len(w)))
                if u != w:
                    # [m ⊗ w] = ε [m^{π⁻¹} ⊗ π·w]
                    mv = vscale(self.M.act_vec(mv, pinv), _reorder_sign(w, pinv, self.vdeg))
                w = u
            rr, _ = self._quotient(w)
            for k, v in rr.reduce(mv).items():
                if v:
                    idx = self.index.get((k, w))
                    if idx is None:
                        raise KeyError(f"{(k, w)} outside the truncation")
                    out[idx] = out.get(idx, 0) + v
        return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# free nilpotent algebras and filtered algebras
# ---------------------------------------------------------------------------

class FreeNilpotentAlgebra:
    """The free P-algebra on V modulo words of length > depth, with its
    length filtration."""

    def __init__(self, P: Operad, V: GradedSpace, depth: int):
        self.P, self.V, self.depth = P, V, depth
        self.T = CoinvariantTensor(P, V, range(1, depth + 1), P.symmetric)
        self.lengths = [len(u) for _, u in self.T.basis]
        basis = [(self._label(i), self.T.degree(i)) for i in range(self.T.dim)]
        self.space = GradedSpace(f"Free_{P.name}({V.name})≤{depth}", basis, check=False)

    def _label(self, i: int):
        m, u = self.T.basis[i]
        return (m, tuple(self.V.label(a) for a in u))

    def generator(self, a: int) -> Vector:
        return self.T.normal_form({(next(iter(self.P.unit())), (a,)): ONE})

    def gamma(self, p: Vector, inputs: Sequence[Vector]) -> Vector:
        """γ(p; a_1,…,a_k) by operadic composition and renormalisation."""
        out: Dict = {}
        for combo in product(*[list(a.items()) for a in inputs]):
            coeff = ONE
            ms, ws = [], []
            prev = 0
            for idx, c in combo:
                m, u = self.T.basis[idx]
                coeff *= c * _sign(self.P.degree(m) * prev)
                prev += sum(self.T.vdeg[a] for a in u)
                ms.append({m: ONE})
                ws.extend(u)
            if len(ws) > self.depth:
                continue
            for key, c in self.P.gamma(p, ms).items():
                out[(key, tuple(ws))] = out.get((key, tuple(ws)), 0) + c * coeff
        return self.T.normal_form(out)

    def product_table(self, gen) -> Dict[Tuple[int, int], Vector]:
        tab = {}
        for i in range(self.T.dim):
            for j in range(self.T.dim):
                v = self.gamma({gen: ONE}, [{i: ONE}, {j: ONE}])
                if v:
                    tab[(i, j)] = v
        return tab

    def as_palgebra(self, arity_cap: int) -> PAlgebra:
        from .linfty_algebra import generator_key
        return binary_algebra(self.P, self.space, self.product_table(generator_key(self.P)),
                              arity_cap, self.space.name)


class FilteredAlgebra:
    """A P-algebra with a descending filtration by based subspaces:
    basis vector i lies in F_n for n ≤ level[i], and F_depth = 0."""

    def __init__(self, A: PAlgebra, level: Sequence[int], depth: int):
        self.A, self.level, self.depth = A, list(level), depth

    @classmethod
    def free(cls, P: Operad, V: GradedSpace, depth: int) -> "FilteredAlgebra":
        F = FreeNilpotentAlgebra(P, V, depth)
        return cls(F.as_palgebra(depth + 2), F.lengths, depth + 1)

    def project(self, vec: Vector, m: int) -> Vector:
        """Image in A/F_m A (on the complement spanned by levels < m)."""
        return {k: v for k, v in vec.items() if self.level[k] < m}

    def violations(self) -> List[str]:
        bad = []
        for (t, s), c in self.A.V.d_entries.items():
            if c and self.level[t] < self.level[s]:
                bad.append(f"d does not preserve the filtration at {s}")
        for n in range(2, self.A.arity_cap + 1):
            for p in self.A.P.basis(n):
                for (_, o, I), c in self.A.structure(p).items():
                    if c and self.level[o] < sum(self.level[a] for a in I):
                        bad.append(f"γ({p}) lowers the filtration at {I}")
        if any(lv >= self.depth for lv in self.level):
            bad.append("filtration is not exhausted at the stated depth")
        return bad

    def gamma(self, p: Vector, inputs: Sequence[Vector]) -> Vector:
        from .linfty_algebra import hom_evaluate
        return hom_evaluate(self.A.apply(p), inputs)

    def gamma_quotient(self, m: int, p: Vector, inputs: Sequence[Vector]) -> Vector:
        """γ_{A/F_m A}: project the inputs, compose, project the output."""
        return self.project(self.gamma(p, [self.project(a, m) for a in inputs]), m)

    def gamma_hat_system(self, x: Sequence[Tuple[Vector, Sequence[Vector]]]) -> Dict[int, Vector]:
        """The compatible family {Σ_{k<m} γ_{A/F_m}(p_k ⊗ a_m…) mod F_m}_m for
        x = (p_k ⊗ a^{k,1} ⊗ … ⊗ a^{k,k})_k ∈ P̂(A)."""
        out = {}
        for m in range(1, self.depth + 1):
            val: Vector = {}
            for p, inputs in x:
                if len(inputs) < m:
                    vadd(val, self.gamma_quotient(m, p, inputs))
            out[m] = {k: v for k, v in val.items() if v}
        return out

    def gamma_hat(self, x) -> Vector:
        """γ̂(x) as the limit of the system, which stabilises at m = depth."""
        system = self.gamma_hat_system(x)
        for m in range(1, self.depth):
            if self.project(system[m + 1], m) != system[m]:
                raise ArithmeticError(f"inverse system is not compatible at level {m}")
        return system[self.depth]

    def direct(self, x) -> Vector:
        """Σ_k γ_A(p_k ⊗ …), finite because A is nilpotent."""
        val: Vector = {}
        for p, inputs in x:
            vadd(val, self.gamma(p, inputs))
        return {k: v for k, v in val.items() if v}


def random_complete_element(F: FilteredAlgebra, max_arity: int, rng: random.Random,
                            terms: int = 2) -> List[Tuple[Vector, List[Vector]]]:
    """A random element of P̂(A) with components up to `max_arity`."""
    P = F.A.P
    out = []
    pick = lambda: Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    for k in range(1, max_arity + 1):
        for _ in range(terms):
            basis = P.basis(k)
            p = {rng.choice(basis): pick() or ONE}
            inputs = []
            for _ in range(k):
                a = {i: pick() for i in rng.sample(range(F.A.V.dim), min(3, F.A.V.dim))}
                inputs.append({i: c for i, c in a.items() if c})
            out.append((p, inputs))
    return out


# ---------------------------------------------------------------------------
# s⁻¹D as a B Q-coalgebra, ⋆_ψ and the two residuals
# ---------------------------------------------------------------------------

def _q_operad(D: CCoalgebra, psi: OperadMorphism) -> Operad:
    return psi.source


def _eps(I: Sequence[int], degs: Sequence[int]) -> int:
    """(φ⊗…⊗φ)(x_1⊗…⊗x_n) = (−1)^ε φ(x_1)⊗…⊗φ(x_n) for |φ| odd."""
    n = len(I)
    return sum((n - 1 - k) * degs[I[k]] for k in range(n))


def desuspended_coproduct(D: CCoalgebra, Q: Operad) -> Dict[int, Dict[int, List]]:
    """Δ̄_{s⁻¹D}(n)(s⁻¹x) = (−1)^{n|q|+ε+1+n(n−1)/2} s q ⊗ s⁻¹x_1 ⊗ … ⊗ s⁻¹x_n
    for each term s(S_n⊗q) ⊗ x_1 ⊗ … ⊗ x_n of Δ̄_D(n)(x)."""
    degs = D.D.degrees()
    out: Dict[int, Dict[int, List]] = {}
    for n, table in D.delta.items():
        new: Dict[int, List] = {}
        for o, terms in table.items():
            for q, I, c in terms:
                e = n * Q.degree(q) + _eps(I, degs) + 1 + n * (n - 1) // 2
                new.setdefault(o, []).append((q, I, c * _sign(e)))
        out[n] = new
    return out


def suspended_coproduct(delta_s: Dict[int, Dict[int, List]], degs_D: Sequence[int],
                        Q: Operad) -> Dict[int, Dict[int, List]]:
    """Inverse of `desuspended_coproduct` (the sign is an involution)."""
    out: Dict[int, Dict[int, List]] = {}
    for n, table in delta_s.items():
        new: Dict[int, List] = {}
        for o, terms in table.items():
            for q, I, c in terms:
                e = n * Q.degree(q) + _eps(I, degs_D) + 1 + n * (n - 1) // 2
                new.setdefault(o, []).append((q, I, c * _sign(e)))
        out[n] = new
    return out


def desuspended_space(D: GradedSpace) -> GradedSpace:
    """s⁻¹D with d(s⁻¹x) = −s⁻¹(dx)."""
    return GradedSpace(f"s⁻¹{D.name}", [(("s-1", l), d - 1) for l, d in D.basis],
                       {k: -c for k, c in D.d_entries.items()}, check=False)


def _coinv_coeff(Q: Operad, n: int) -> Fraction:
    # invariants → coinvariants through v ↦ (1/|G|)[v]
    return Fraction(1, factorial(n)) if Q.symmetric else ONE


def star_alpha(psi: OperadMorphism, D: CCoalgebra, A: PAlgebra,
               sphi: Dict[Tuple[int, int], Fraction]) -> Dict[Tuple[int, int], Fraction]:
    """⋆_ψ(sφ) = γ_A ∘ (ψ ∘ sφ) ∘ Δ_{s⁻¹D} for a degree-0 map sφ: s⁻¹D → A
    given as {(a, x): c}; ψ is Ψ on the weight-one part and zero beyond, and
    invariants pass to coinvariants through the averaging isomorphism."""
    Q = psi.source
    ds = desuspended_coproduct(D, Q)
    cols: Dict[int, Vector] = {}
    for (a, x), c in sphi.items():
        if c:
            cols.setdefault(x, {})[a] = Fraction(c)
    from .linfty_algebra import hom_evaluate
    out: Dict[Tuple[int, int], Fraction] = {}
    for n, table in ds.items():
        w = _coinv_coeff(Q, n)
        for o, terms in table.items():
            for q, I, c in terms:
                inputs = [cols.get(x, {}) for x in I]
                if not all(inputs):
                    continue
                val = hom_evaluate(A.apply(psi(q)), inputs)
                for a, v in val.items():
                    out[(a, o)] = out.get((a, o), 0) + w * c * v
    return {k: v for k, v in out.items() if v}


def star_components(psi, D, A, sphi) -> Dict[int, Dict[Tuple[int, int], Fraction]]:
    """⋆^{(n)}_ψ(sφ), the part passing through Q(n) ⊗ (s⁻¹D)^{⊗n}."""
    out = {}
    for n in D.delta:
        part = CCoalgebra(D.D, D.qname, {n: D.delta[n]}, D.conilpotent)
        out[n] = star_alpha(psi, part, A, sphi)
    return out


def partial_of(A: PAlgebra, D: GradedSpace, sphi) -> Dict[Tuple[int, int], Fraction]:
    """∂(sφ) = d_A ∘ sφ − sφ ∘ d_{s⁻¹D} for a degree-0 map."""
    sD = desuspended_space(D)
    out: Dict[Tuple[int, int], Fraction] = {}
    for (a, x), c in sphi.items():
        for (t, s), e in A.V.d_entries.items():
            if s == a:
                out[(t, x)] = out.get((t, x), 0) + c * e
        for (t, s), e in sD.d_entries.items():
            if t == x:
                out[(a, s)] = out.get((a, s), 0) - c * e
    return {k: v for k, v in out.items() if v}


def suspend_map(phi: Dict[Tuple[int, int], Fraction], deg: int) -> Dict[Tuple[int, int], Fraction]:
    """sφ(s⁻¹x) = (−1)^{|φ|+1} φ(x)."""
    s = _sign(deg + 1)
    return {k: s * v for k, v in phi.items() if v}


def hom_vector_to_map(v: Vector, dimD: int) -> Dict[Tuple[int, int], Fraction]:
    return {(i // dimD, i % dimD): c for i, c in v.items() if c}


def map_to_hom_vector(m: Dict[Tuple[int, int], Fraction], dimD: int) -> Vector:
    return {a * dimD + x: c for (a, x), c in m.items() if c}


class MCTwComparison:
    """Residuals of φ ∈ hom^Ψ(D, A)_{−1} on both sides, arity by arity."""

    def __init__(self, psi: OperadMorphism, D: CCoalgebra, A: PAlgebra, H: Optional[HomotopyAlgebra] = None):
        self.psi, self.D, self.A = psi, D, A
        self.H = H or hom_structure(D, A, psi)
        self.dimD = D.D.dim

    def mc_components(self, phi: Vector) -> Dict[int, Dict]:
        from .linfty_algebra import hom_evaluate
        H = self.H
        out = {1: hom_vector_to_map(H.V.d(phi), self.dimD)}
        for n in range(2, H.arity_cap + 1):
            val = hom_evaluate(H.bracket(n), [phi] * n)
            w = Fraction(1, factorial(n)) if H.symmetric else ONE
            out[n] = hom_vector_to_map(vscale(val, w), self.dimD)
        return out

    def tw_components(self, phi: Vector) -> Dict[int, Dict]:
        sphi = suspend_map(hom_vector_to_map(phi, self.dimD), -1)
        out = {1: partial_of(self.A, self.D.D, sphi)}
        out.update(star_components(self.psi, self.D, self.A, sphi))
        return out

    def compare(self, phi: Vector) -> dict:
        """T^{(n)}(s⁻¹x) = R^{(n)}(x) for every arity n, i.e. the Tw residual is
        −s applied to the MC residual."""
        R, T = self.mc_components(phi), self.tw_components(phi)
        arities = sorted(set(R) | set(T))
        match = {n: R.get(n, {}) == T.get(n, {}) for n in arities}
        mc_zero, tw_zero = not _total(R), not _total(T)
        return {"arity_match": match, "mc_zero": mc_zero, "tw_zero": tw_zero,
                "simultaneous": mc_zero == tw_zero}


def _total(comps: Dict[int, Dict]) -> Dict:
    out: Dict = {}
    for part in comps.values():
        for k, v in part.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def mc_tw_equivalence(psi: OperadMorphism, D: CCoalgebra, A: PAlgebra, phi: Vector,
                      H: Optional[HomotopyAlgebra] = None) -> dict:
    return MCTwComparison(psi, D, A, H).compare(phi)


def degree_minus_one(H: HomotopyAlgebra) -> List[int]:
    return [i for i, d in enumerate(H.V.degrees()) if d == -1]


def random_degree_minus_one(H: HomotopyAlgebra, rng: random.Random, scale: int = 3) -> Vector:
    v = {}
    for i in degree_minus_one(H):
        c = Fraction(rng.randint(-scale, scale), rng.randint(1, scale))
        if c:
            v[i] = c
    return v


# ---------------------------------------------------------------------------
# the complete cobar construction Ω̂_ψ(s⁻¹D)
# ---------------------------------------------------------------------------

class CompleteCobar:
    """(P̂(s⁻¹D), d₁ + d₂) truncated at weight `weight`: d₁ is the derivation
    induced by the differentials of P and s⁻¹D, and −d₂ is the derivation
    extending (ψ ∘ id) ∘ Δ_{s⁻¹D}.  Dropping weights above the truncation is a
    quotient of complexes, since neither part lowers the weight."""

    def __init__(self, psi: OperadMorphism, D: CCoalgebra, weight: int):
        self.psi, self.D, self.weight = psi, D, weight
        self.P = psi.target
        self.V = desuspended_space(D.D)
        self.free = FreeNilpotentAlgebra(self.P, self.V, weight)
        self._unit = next(iter(self.P.unit()))
        self._gen_d = {v: self._generator_d(v) for v in range(self.V.dim)}
        self._d_cache: Dict[int, Vector] = {}

    @property
    def dim(self) -> int:
        return self.free.T.dim

    def gen(self, v: int) -> Vector:
        return self.free.generator(v)

    def _generator_d(self, v: int) -> Vector:
        T = self.free.T
        out: Dict = {}
        for (t, s), c in self.V.d_entries.items():
            if s == v:
                out[(self._unit, (t,))] = out.get((self._unit, (t,)), 0) + c
        ds = desuspended_coproduct(self.D, self.psi.source)
        for n, table in ds.items():
            if n > self.weight:
                continue
            w = _coinv_coeff(self.psi.source, n)
            for q, I, c in table.get(v, []):
                for key, cp in self.psi(q).items():
                    out[(key, tuple(I))] = out.get((key, tuple(I)), 0) - w * c * cp
        return T.normal_form(out)

    def d(self, b: int) -> Vector:
        got = self._d_cache.get(b)
        if got is not None:
            return got
        T = self.free.T
        p, u = T.basis[b]
        out: Vector = {}
        dp = self.P.d(p)
        if dp:
            vadd(out, T.normal_form({(k, u): c for k, c in dp.items()}))
        pre = self.P.degree(p)
        for j, a in enumerate(u):
            inputs = [self.gen(x) for x in u]
            inputs[j] = self._gen_d[a]
            if inputs[j]:
                vadd(out, self.free.gamma({p: ONE}, inputs), _sign(pre))
            pre += self.V.degree(a)
        out = {k: v for k, v in out.items() if v}
        self._d_cache[b] = out
        return out

    def d_vec(self, X: Vector) -> Vector:
        out: Vector = {}
        for b, c in X.items():
            vadd(out, self.d(b), c)
        return {k: v for k, v in out.items() if v}

    def square_defect(self) -> List[int]:
        return [b for b in range(self.dim) if self.d_vec(self.d(b))]

    # morphisms to a nilpotent algebra --------------------------------------
    def extend(self, A: PAlgebra, gens: Dict[Tuple[int, int], Fraction]) -> Dict[int, Vector]:
        """The algebra morphism with the given values {(a, v): c} on s⁻¹D."""
        from .linfty_algebra import hom_evaluate
        cols: Dict[int, Vector] = {}
        for (a, v), c in gens.items():
            if c:
                cols.setdefault(v, {})[a] = Fraction(c)
        out: Dict[int, Vector] = {}
        for b, (p, u) in enumerate(self.free.T.basis):
            inputs = [cols.get(x, {}) for x in u]
            out[b] = hom_evaluate(A.structure(p), inputs) if all(inputs) else {}
        return out

    def restrict(self, F: Dict[int, Vector]) -> Dict[Tuple[int, int], Fraction]:
        out = {}
        for v in range(self.V.dim):
            for b, c in self.gen(v).items():
                for a, x in F.get(b, {}).items():
                    out[(a, v)] = out.get((a, v), 0) + c * x
        return {k: v for k, v in out.items() if v}

    def morphism_defect(self, A: PAlgebra, F: Dict[int, Vector]) -> Dict[int, Vector]:
        """F ∘ d − d_A ∘ F on every basis element."""
        bad = {}
        for b in range(self.dim):
            lhs: Vector = {}
            for bb, c in self.d(b).items():
                vadd(lhs, F.get(bb, {}), c)
            vadd(lhs, A.V.d(F.get(b, {})), -1)
            lhs = {k: v for k, v in lhs.items() if v}
            if lhs:
                bad[b] = lhs
        return bad


def complete_cobar(psi: OperadMorphism, D: CCoalgebra, weight: int) -> CompleteCobar:
    return CompleteCobar(psi, D, weight)


# ---------------------------------------------------------------------------
# bijections: MC elements ↔ morphisms out of the complete cobar algebra
# ---------------------------------------------------------------------------

def mc_polynomials(H: HomotopyAlgebra, directions: Sequence[Vector], names: Sequence[str] = None):
    """The MC residual of Σ t_i e_i as sympy polynomials, one per basis vector."""
    import sympy as sp
    from .linfty_algebra import hom_evaluate
    ts = sp.symbols(names or [f"t{i}" for i in range(len(directions))])
    ts = list(ts) if isinstance(ts, (list, tuple)) else [ts]
    res: Dict[int, object] = {}

    def add(vec, mono):
        for k, c in vec.items():
            res[k] = res.get(k, 0) + sp.Rational(c.numerator, c.denominator) * mono

    for i, e in enumerate(directions):
        add(H.V.d(e), ts[i])
    for n in range(2, H.arity_cap + 1):
        w = sp.Rational(1, factorial(n)) if H.symmetric else sp.Integer(1)
        for idx in product(range(len(directions)), repeat=n):
            val = hom_evaluate(H.bracket(n), [directions[i] for i in idx])
            if val:
                mono = w
                for i in idx:
                    mono *= ts[i]
                add(val, mono)
    eqs = [sp.expand(v) for v in res.values() if sp.expand(v) != 0]
    return ts, eqs


def mc_solutions(H: HomotopyAlgebra, directions: Sequence[Vector],
                 samples: Sequence[Fraction] = (Fraction(0), Fraction(1), Fraction(-2, 3))) -> List[Vector]:
    """Rational MC elements in the span of `directions`: the solution set of
    the MC polynomials, with free parameters specialised to `samples`."""
    import sympy as sp
    ts, eqs = mc_polynomials(H, directions)
    sols = sp.solve(eqs, ts, dict=True) if eqs else [{}]
    out: List[Vector] = []
    seen = set()
    for sol in sols:
        free = [t for t in ts if t not in sol]
        for vals in product(samples, repeat=len(free)):
            sub = {t: sp.Rational(v.numerator, v.denominator) for t, v in zip(free, vals)}
            point = []
            for t in ts:
                val = sp.nsimplify(sol[t].subs(sub)) if t in sol else sub[t]
                if not val.is_rational:
                    point = None
                    break
                point.append(Fraction(int(val.p), int(val.q)))
            if point is None or tuple(point) in seen:
                continue
            seen.add(tuple(point))
            vec: Vector = {}
            for c, e in zip(point, directions):
                vadd(vec, e, c)
            out.append({k: v for k, v in vec.items() if v})
    return out


class MCBijection:
    """MC(hom^Ψ(D, A)) ≅ hom(Ω̂_ψ(s⁻¹D), A) for a nilpotent A, through
    φ ↦ sφ ↦ its extension, and back by restriction."""

    def __init__(self, psi: OperadMorphism, D: CCoalgebra, A: PAlgebra, depth: int,
                 H: Optional[HomotopyAlgebra] = None):
        self.psi, self.D, self.A = psi, D, A
        self.H = H or hom_structure(D, A, psi)
        self.cobar = CompleteCobar(psi, D, depth)
        self.dimD = D.D.dim

    def to_morphism(self, phi: Vector) -> Dict[int, Vector]:
        sphi = suspend_map(hom_vector_to_map(phi, self.dimD), -1)
        return self.cobar.extend(self.A, sphi)

    def to_mc(self, F: Dict[int, Vector]) -> Vector:
        # sφ(s⁻¹x) = φ(x) in degree −1
        return map_to_hom_vector(suspend_map(self.cobar.restrict(F), -1), self.dimD)

    def certify(self, phi: Vector) -> dict:
        F = self.to_morphism(phi)
        back = self.to_mc(F)
        again = self.to_morphism(back)
        return {
            "mc_zero": not self.H.mc_residual(phi),
            "morphism": not self.cobar.morphism_defect(self.A, F),
            "phi_round_trip": back == {k: v for k, v in phi.items() if v},
            "morphism_round_trip": {b: v for b, v in again.items() if v} == {b: v for b, v in F.items() if v},
        }


def mc_bijections(psi: OperadMorphism, D: CCoalgebra, A: PAlgebra, depth: int,
                  elements: Sequence[Vector], H: Optional[HomotopyAlgebra] = None) -> List[dict]:
    B = MCBijection(psi, D, A, depth, H)
    return [B.certify(phi) for phi in elements]


def tensor_mc_bijection(psi: OperadMorphism, A: PAlgebra, C: HomotopyAlgebra, depth: int,
                        elements: Sequence[Vector]) -> List[dict]:
    """MC(A ⊗^Ψ C) ≅ hom(Ω̂_ψ(s⁻¹C^∨), A): x ↦ its image in hom(C^∨, A) ↦ morphism."""
    T = tensor_structure(A, C, psi)
    D = dual_coalgebra(C)
    B = MCBijection(psi, D, A, depth)
    iso = tensor_to_hom(A.V, C.V)
    diag = {s: c for (t, s), c in iso.items()}
    out = []
    for x in elements:
        phi = {k: c * diag[k] for k, c in x.items() if c}
        cert = B.certify(phi)
        back = {k: c / diag[k] for k, c in B.to_mc(B.to_morphism(phi)).items()}
        cert["tensor_mc_zero"] = not T.mc_residual(x)
        cert["tensor_round_trip"] = back == {k: v for k, v in x.items() if v}
        out.append(cert)
    return out


# ---------------------------------------------------------------------------
# the relative bar construction B_π X and the deformation complex
# ---------------------------------------------------------------------------

def _relabelled(sub, ls: Sequence[int], M, symmetric: bool) -> Vector:
    """A subtree with leaves `ls` (sorted) renamed 0…m−1, canonicalised with
    its own vertex order as tensor order."""
    from .tree_calculus import canonical_vector, relabel_leaves, tag_canonical
    pos = {a: r for r, a in enumerate(ls)}
    return canonical_vector(relabel_leaves(tag_canonical(sub), lambda a: pos[a]), M, symmetric)


def _composite(bar, root_label, parts: Sequence) -> Tuple[Vector, List[int]]:
    """corolla(root) ∘ (parts), grafted left to right so that the tensor order
    is root, part_1, part_2, …; leaf parts are None.  Returns the planar
    composite and the block sizes."""
    from .tree_calculus import arity_of, corolla
    k = len(parts)
    cur: Vector = {corolla(root_label, k): ONE}
    sizes, pos = [], 1
    for part in parts:
        if part is None:
            sizes.append(1)
            pos += 1
            continue
        m = arity_of(part)
        nxt: Vector = {}
        for t, c in cur.items():
            vadd(nxt, bar.graft(t, pos, part), c)
        cur = nxt
        sizes.append(m)
        pos += m
    return cur, sizes


class RelativeBar:
    """B_π X = (BP ∘ X, d) for a P-algebra X, truncated at `weight_cap`
    vertices and `arity_cap` leaves (a sub-coalgebra and subcomplex).
    Index 0…dim X − 1 is the weight-zero copy of X; the rest are classes
    [t ⊗ x_1 … x_n] of bar trees with decorated leaves."""

    def __init__(self, X: PAlgebra, weight_cap: int = 2, arity_cap: int = 3):
        from .barcobar import BarConstruction
        self.X, self.P = X, X.P
        self.bar = BarConstruction(self.P, arity_cap, weight_cap)
        self.T = CoinvariantTensor(self.bar, X.V, range(2, arity_cap + 1), self.P.symmetric)
        self.nX = X.V.dim
        self.arity_cap, self.weight_cap = arity_cap, weight_cap
        xd = X.V.degrees()
        basis = [(("x", X.V.label(a)), xd[a]) for a in range(self.nX)]
        basis += [(("t", self.T.basis[i][0], tuple(X.V.label(a) for a in self.T.basis[i][1])), self.T.degree(i))
                  for i in range(self.T.dim)]
        d = {}
        for b in range(len(basis)):
            for t, c in self.d(b).items():
                d[(t, b)] = c
        self.space = GradedSpace(f"B_π({X.name})", basis, d, check=False)

    @property
    def dim(self) -> int:
        return self.nX + self.T.dim

    def _class(self, tvec: Vector, word: Sequence[int]) -> Vector:
        """[t ⊗ w] for a tree vector t (trees of arity len(w)) or the identity."""
        if len(word) == 1 and tvec is None:
            return {word[0]: ONE}
        out = self.T.normal_form({(t, tuple(word)): c for t, c in tvec.items()})
        return {self.nX + i: c for i, c in out.items()}

    # -- differential ----------------------------------------------------------
    def d(self, b: int) -> Vector:
        from .linfty_algebra import hom_evaluate
        from .tree_calculus import corolla, is_leaf, leaves, replace_at, subtree, vertex_paths
        xd = self.X.V.degrees()
        out: Vector = {}
        if b < self.nX:
            for (t, s), c in self.X.V.d_entries.items():
                if s == b:
                    out[t] = out.get(t, 0) + c
            return {k: v for k, v in out.items() if v}
        t, w = self.T.basis[b - self.nX]
        tdeg = self.bar.degree(t)
        # bar differential
        vadd(out, self._class(self.bar.d(t), w))
        # internal differential of X
        pre = tdeg
        for i, a in enumerate(w):
            for (tt, s), c in self.X.V.d_entries.items():
                if s == a:
                    vadd(out, self._class({t: ONE}, w[:i] + (tt,) + w[i + 1:]), c * _sign(pre))
            pre += xd[a]
        # contraction of a vertex whose inputs are all leaves: π then γ_X
        for path in vertex_paths(t):
            node = subtree(t, path)
            if not all(is_leaf(c) for c in node[1]):
                continue
            ls = sorted(leaves(node))
            m = len(ls)
            pv = node[0][1]
            if len(path) == 0:
                # the whole tree is one vertex: result lands in X
                val = hom_evaluate(self.X.structure(pv), [{a: ONE} for a in self._read(node, w)])
                for o, c in val.items():
                    out[o] = out.get(o, 0) + c
                continue
            first = ls[0]
            rest = replace_at(t, path, first)
            keep = sorted(leaves(rest))
            tprime = _relabelled(rest, keep, self.bar.L, self.P.symmetric)
            i = keep.index(first) + 1
            for tp, cp in tprime.items():
                planar = self.bar.graft(tp, i, corolla(node[0], m))
                reads = keep[:i - 1] + ls + keep[i:]
                pinv = tuple(reads)
                pi = perm_inverse(pinv)
                acted = self.bar.act_vec(planar, pi)
                coeff = acted.get(t)
                if coeff is None:
                    raise AssertionError("vertex contraction failed to reproduce the tree")
                # t = (cp·coeff)⁻¹ (t' ∘_i v)^π;  [M^π ⊗ w] = ε [M ⊗ π·w]
                ww = tuple(w[pinv[r]] for r in range(len(w)))
                eps = _reorder_sign(w, pinv, xd)
                sign = eps * _sign(self.bar.degree(tp)) / (cp * coeff)
                inner = ww[i - 1:i - 1 + m]
                val = hom_evaluate(self.X.structure(pv), [{a: ONE} for a in inner])
                for o, c in val.items():
                    neww = ww[:i - 1] + (o,) + ww[i - 1 + m:]
                    vadd(out, self._class({tp: ONE}, neww), sign * c)
        return {k: v for k, v in out.items() if v}

    @staticmethod
    def _read(node, w):
        return [w[c] for c in node[1]]

    # -- the weight-one part of the decomposition --------------------------------
    def root_coproduct(self, b: int) -> List[Tuple[Hashable, Tuple[int, ...], Fraction]]:
        """Δ̄(k)(b) as terms (q, I, c) of s q ⊗ b_{I_1} ⊗ … ⊗ b_{I_k}, written
        as the full invariant (norm of the class)."""
        from .tree_calculus import is_leaf, leaves
        if b < self.nX:
            return []
        t, w = self.T.basis[b - self.nX]
        xd = self.X.V.degrees()
        kids = t[1]
        parts, blocks = [], []
        for c in kids:
            if is_leaf(c):
                parts.append(None)
                blocks.append([c])
            else:
                ls = sorted(leaves(c))
                parts.append(_relabelled(c, ls, self.bar.L, self.P.symmetric))
                blocks.append(ls)
        reads = [a for blk in blocks for a in blk]
        pinv = tuple(reads)
        pi = perm_inverse(pinv)
        ww = tuple(w[pinv[r]] for r in range(len(w)))
        eps = _reorder_sign(w, pinv, xd)
        terms: List = []
        for choice in product(*[[(None, ONE)] if p is None else list(p.items()) for p in parts]):
            trees = [tr for tr, _ in choice]
            cc = ONE
            for _, c in choice:
                cc *= c
            planar, sizes = _composite(self.bar, t[0], trees)
            coeff = self.bar.act_vec(planar, pi).get(t)
            if coeff is None:
                raise AssertionError("root decomposition failed to reproduce the tree")
            # Koszul sign of moving each subtree past the letters of earlier blocks
            pos, before, ks = 0, 0, 0
            classes = []
            for tr, size in zip(trees, sizes):
                letters = ww[pos:pos + size]
                if tr is not None:
                    ks += self.bar.degree(tr) * before
                classes.append(self._class(None if tr is None else {tr: ONE}, letters))
                before += sum(xd[a] for a in letters)
                pos += size
            base = eps * _sign(ks) / (cc * coeff)
            terms.extend(self._norm(t[0][1], classes, base))
        return terms

    def _norm(self, p, classes: List[Vector], base: Fraction):
        """Σ_σ (s p ⊗ D_1 ⊗ … ⊗ D_k)^σ = Σ_σ s p^σ ⊗ σ⁻¹·(D) with Koszul signs."""
        k = len(classes)
        degs = self.space.degrees()
        out = []
        for combo in product(*[list(c.items()) for c in classes]):
            idx = [i for i, _ in combo]
            cf = base
            for _, c in combo:
                cf *= c
            perms = all_perms(k) if self.P.symmetric else [tuple(range(k))]
            for sigma in perms:
                # (σ⁻¹·D)_i = D_{σ(i)}
                new = tuple(idx[sigma[i]] for i in range(k))
                s = _reorder_sign(idx, sigma, degs)
                for q, cq in (self.P.act(p, sigma) if self.P.symmetric else {p: ONE}).items():
                    out.append((q, new, cf * cq * s))
        return out

    def as_suspended_coalgebra(self) -> CCoalgebra:
        """D = s B_π X as a B(S⊗P)-coalgebra (weight-one part)."""
        Q = self.P
        delta_s: Dict[int, Dict[int, List]] = {}
        for b in range(self.dim):
            for q, I, c in self.root_coproduct(b):
                if c:
                    delta_s.setdefault(len(I), {}).setdefault(b, []).append((q, I, c))
        degs_D = [x + 1 for x in self.space.degrees()]
        delta = suspended_coproduct(delta_s, degs_D, Q)
        Dsp = GradedSpace(f"s{self.space.name}", [(("s", l), d + 1) for l, d in self.space.basis],
                          {k: -c for k, c in self.space.d_entries.items()}, check=False)
        return CCoalgebra(Dsp, "Com" if Q.symmetric else "As", delta, conilpotent=True)


def deformation_complex(X: PAlgebra, Y: PAlgebra, weight_cap: int = 2, arity_cap: int = 3,
                        psi: Optional[OperadMorphism] = None) -> HomotopyAlgebra:
    """hom^P(s B_π X, Y), an L∞-algebra whose MC elements are the morphisms
    Ω_π B_π X → Y."""
    from .main_theorem import identity_morphism
    psi = psi or identity_morphism(X.P, "id")
    R = RelativeBar(X, weight_cap, arity_cap)
    D = R.as_suspended_coalgebra()
    return hom_structure(D, Y, psi, arity_cap)


def strict_map_as_mc(X: PAlgebra, Y: PAlgebra, f: Dict[Tuple[int, int], Fraction], H: HomotopyAlgebra) -> Vector:
    """The degree −1 element of hom(s B_π X, Y) supported on s X: x ↦ f(x)."""
    dimD = H.V.dim // Y.V.dim
    return {a * dimD + x: Fraction(c) for (a, x), c in f.items() if c}
