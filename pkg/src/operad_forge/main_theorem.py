"""
From an operad morphism Ψ: Q → P to morphisms out of L∞ (and A∞).

* `m_psi` builds M_Ψ: L∞ → P ⊗_H Ω((S⁻¹)^c⊗Q^∨), ℓ_n ↦ Σ_q (−1)^{n|Ψ(q)|} Ψ(q) ⊗ g_q,
  extended to trees by decorating every vertex, separating the two kinds of
  labels and composing the P side;
* `MBarPsi` is the dual picture L∞ → hom(B(S⊗Q), P);
* `PsiElements` holds the invariant elements Ψ_n = Σ Ψ(q) ⊗ q^∨ and checks
  the closure and composition identities they satisfy;
* `manin_morphism` is the induced Lie → P ⊗_H Q^! for binary quadratic Ψ.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .barcobar import (BarConstruction, CobarOperad, a_gen, bar, canonical_map_to_dual, ell,
                       resolution_to_lie)
from .exact_core import (ONE, Vector, all_perms, enumerate_shuffles, perm_inverse, perm_sign,
                         reorder_sign, vadd, vscale)
from .operad_base import Operad
from .smodule_operad import (LIE_B, As, Ass, Com, HadamardOperad, Lie, PresentedOperad,
                             _sign, ass_data, com_data, koszul_dual_operad, lie_data,
                             operadic_suspension, tensor_vectors)
from .tree_calculus import (corolla, eval_tree, is_leaf, map_labels, subtree, vertex_labels,
                            vertex_paths)


# ---------------------------------------------------------------------------
# operad morphisms
# ---------------------------------------------------------------------------

class OperadMorphism:
    """A degree-0 morphism given on basis elements of the source."""

    def __init__(self, source: Operad, target: Operad, func: Callable[[Hashable], Vector], name: str):
        self.source, self.target, self.func, self.name = source, target, func, name
        self._cache: Dict = {}

    def __call__(self, key) -> Vector:
        r = self._cache.get(key)
        if r is None:
            r = {k: v for k, v in self.func(key).items() if v}
            self._cache[key] = r
        return r

    def apply(self, X: Vector) -> Vector:
        out: Vector = {}
        for k, c in X.items():
            vadd(out, self(k), c)
        return out

    def check(self, max_arity: int) -> bool:
        """Unit, partial compositions and equivariance are preserved."""
        S, T = self.source, self.target
        if self.apply(S.unit()) != T.unit():
            return False
        for m in range(1, max_arity + 1):
            for n in range(1, max_arity + 2 - m):
                for x in S.basis(m):
                    for y in S.basis(n):
                        for i in range(1, m + 1):
                            lhs = self.apply(S.compose(x, i, y))
                            rhs = T.compose_vec(self(x), i, self(y))
                            if lhs != rhs:
                                return False
            if S.symmetric:
                for x in S.basis(m):
                    for perm in all_perms(m):
                        if self.apply(S.act(x, perm)) != T.act_vec(self(x), perm):
                            return False
        return True

    def compose_after(self, other: "OperadMorphism") -> "OperadMorphism":
        """self ∘ other."""
        return OperadMorphism(other.source, self.target, lambda k: self.apply(other(k)),
                              f"{self.name}∘{other.name}")


def identity_morphism(P: Operad, name: str) -> OperadMorphism:
    return OperadMorphism(P, P, lambda k: {k: ONE}, name)


def morphism_u(cap: int = 5) -> OperadMorphism:
    """u: Ass → Com, m_σ ↦ μ_n."""
    return OperadMorphism(Ass(cap), Com(cap), lambda k: {("mu", len(k[1])): ONE}, "u")


def morphism_a(cap: int = 5) -> OperadMorphism:
    """a: Lie → Ass, b ↦ m_id − m_(12), combs expanded."""
    L = Lie(cap)
    return OperadMorphism(L, Ass(cap), L.expand, "a")


def stock_morphism(name: str, cap: int = 5) -> OperadMorphism:
    name = name.lower()
    if name == "id_com":
        return identity_morphism(Com(cap), "id_Com")
    if name == "id_lie":
        return identity_morphism(Lie(cap), "id_Lie")
    if name == "id_ass":
        return identity_morphism(Ass(cap), "id_Ass")
    if name == "id_as":
        return identity_morphism(As(cap), "id_As")
    if name == "u":
        return morphism_u(cap)
    if name == "a":
        return morphism_a(cap)
    raise ValueError(f"unknown morphism {name!r}; expected id_com, id_lie, id_ass, id_as, u or a")


STOCK_MORPHISMS = ("id_com", "id_lie", "id_ass", "u", "a")


# ---------------------------------------------------------------------------
# the elements Ψ_n
# ---------------------------------------------------------------------------

class PsiElements:
    """Ψ_n = Σ_q Ψ(q) ⊗ q^∨ ∈ P(n) ⊗ Q(n)^∨, stored as {(p, q): coeff}."""

    def __init__(self, P: Operad, Q: Operad, elements: Dict[int, Vector]):
        self.P, self.Q = P, Q
        self.elements = {n: dict(v) for n, v in elements.items()}
        self._by_q: Dict[int, Dict[Hashable, List[Tuple[Hashable, Fraction]]]] = {}
        self._gamma_cache: Dict = {}

    @classmethod
    def from_morphism(cls, psi: OperadMorphism, max_arity: int) -> "PsiElements":
        els = {}
        for n in range(1, max_arity + 1):
            v: Vector = {}
            for q in psi.source.basis(n):
                for p, c in psi(q).items():
                    v[(p, q)] = c
            els[n] = v
        return cls(psi.target, psi.source, els)

    def to_morphism(self) -> OperadMorphism:
        """Reconstruct Ψ(q) = Σ_i p_i ⟨q_i^∨, q⟩."""
        def f(q):
            n = self.Q.arity(q)
            return {p: c for (p, q2), c in self.elements.get(n, {}).items() if q2 == q}
        return OperadMorphism(self.Q, self.P, f, "Ψ")

    def mutated(self, n: int, p, q, delta: Fraction) -> "PsiElements":
        els = {k: dict(v) for k, v in self.elements.items()}
        els[n][(p, q)] = els[n].get((p, q), 0) + delta
        if not els[n][(p, q)]:
            del els[n][(p, q)]
        return PsiElements(self.P, self.Q, els)

    def by_q(self, n: int) -> Dict[Hashable, List[Tuple[Hashable, Fraction]]]:
        if n not in self._by_q:
            d: Dict[Hashable, List] = {}
            for (p, q), c in self.elements.get(n, {}).items():
                d.setdefault(q, []).append((p, c))
            self._by_q[n] = d
        return self._by_q[n]

    def value(self, n: int, X: Vector) -> Vector:
        """Σ_i p_i ⟨q_i^∨, X⟩ for X ∈ Q(n)."""
        out: Vector = {}
        table = self.by_q(n)
        for q, c in X.items():
            for p, cp in table.get(q, ()):
                out[p] = out.get(p, 0) + c * cp
        return {k: v for k, v in out.items() if v}

    # invariance ------------------------------------------------------------
    def is_invariant(self, n: int) -> bool:
        """Ψ_n^σ = Ψ_n for the diagonal action (dual action on Q^∨)."""
        if not self.Q.symmetric:
            return True
        base = self.elements.get(n, {})
        for sigma in _generators_of_sym(n):
            inv = perm_inverse(sigma)
            out: Vector = {}
            for (p, q), c in base.items():
                # (q^∨)^σ = Σ_{q'} ⟨q^∨, q'^{σ^{-1}}⟩ q'^∨
                duals = {}
                for q2 in self.Q.basis(n):
                    cq = self.Q.act(q2, inv).get(q)
                    if cq:
                        duals[q2] = cq
                for p2, cp in self.P.act(p, sigma).items():
                    for q2, cq in duals.items():
                        out[(p2, q2)] = out.get((p2, q2), 0) + c * cp * cq
            if {k: v for k, v in out.items() if v} != {k: v for k, v in base.items() if v}:
                return False
        return True

    # closure identity ------------------------------------------------------
    def closure_defect(self, n: int) -> Vector:
        """Σ (d p_i ⊗ q_i^∨ + (−1)^{|p_i|} p_i ⊗ d^∨ q_i^∨), with
        (d^∨ f)(x) = −(−1)^{|f|} f(dx)."""
        out: Vector = {}
        for (p, q), c in self.elements.get(n, {}).items():
            for p2, c2 in self.P.d(p).items():
                out[(p2, q)] = out.get((p2, q), 0) + c * c2
            sgn = _sign(self.P.degree(p))
            # d^∨ q^∨ = Σ_{x} −(−1)^{−|q|}⟨q^∨, dx⟩ x^∨
            for x in self.Q.basis(n):
                cx = self.Q.d(x).get(q)
                if cx:
                    out[(p, x)] = out.get((p, x), 0) - sgn * _sign(self.Q.degree(q)) * c * cx
        return {k: v for k, v in out.items() if v}

    # composition identity ---------------------------------------------------
    def composition_shapes(self, n: int):
        """(k, (n_1,…,n_k), σ) with σ an (n_1,…,n_k)-shuffle."""
        for k in range(1, n + 1):
            for comp in _compositions_of(n, k):
                if not self.Q.symmetric:
                    yield k, comp, tuple(range(n))
                    continue
                for sh in enumerate_shuffles(*comp):
                    yield k, comp, tuple(sh.perm)

    def composition_defects(self, n: int, stop_at_first: bool = False) -> List[Tuple]:
        """Shapes and inputs where Σ p_i⟨q_i^∨, γ_Q(r; r_•)^σ⟩ differs from
        Σ ±γ_P(p_i; p_{i_•})^σ pairing q_i^∨ ⊗ (q_{i_•}^∨) with r ⊗ (r_•)."""
        P, Q = self.P, self.Q
        bad = []
        for k, comp, sigma in self.composition_shapes(n):
            pi = perm_inverse(sigma)
            for r in Q.basis(k):
                for rs in product(*[Q.basis(m) for m in comp]):
                    lhs = self.value(n, Q.act_vec(self._gamma_Q(r, rs), pi))
                    rhs = self._rhs(k, comp, r, rs)
                    rhs = P.act_vec(rhs, pi) if rhs else rhs
                    if lhs != rhs:
                        bad.append((k, comp, sigma, r, rs))
                        if stop_at_first:
                            return bad
        return bad

    def _gamma_Q(self, r, rs) -> Vector:
        key = (r, rs)
        v = self._gamma_cache.get(key)
        if v is None:
            v = self.Q.gamma({r: ONE}, [{x: ONE} for x in rs])
            self._gamma_cache[key] = v
        return v

    def _rhs(self, k, comp, r, rs) -> Vector:
        P, Q = self.P, self.Q
        top = self.by_q(k).get(r, ())
        lower = [self.by_q(m).get(x, ()) for m, x in zip(comp, rs)]
        if not top or any(not l for l in lower):
            return {}
        dq = Q.degree(r)
        dqs = [Q.degree(x) for x in rs]
        eps = dq * sum(dqs) + sum(dqs[a] * dqs[b] for a in range(k) for b in range(a + 1, k))
        out: Vector = {}
        for p, c in top:
            for choice in product(*lower):
                coeff = c * _sign(eps)
                for _, cj in choice:
                    coeff *= cj
                vadd(out, P.gamma({p: ONE}, [{pj: ONE} for pj, _ in choice]), coeff)
        return {k2: v for k2, v in out.items() if v}

    def verify(self, max_arity: int, stop_at_first: bool = False) -> Dict[str, bool]:
        inv = all(self.is_invariant(n) for n in range(1, max_arity + 1))
        eq1 = all(not self.closure_defect(n) for n in range(1, max_arity + 1))
        eq2 = True
        for n in range(1, max_arity + 1):
            if self.composition_defects(n, stop_at_first=True):
                eq2 = False
                break
        return {"invariance": inv, "closure": eq1, "composition": eq2}


def _generators_of_sym(n: int):
    for k in range(n - 1):
        p = list(range(n))
        p[k], p[k + 1] = p[k + 1], p[k]
        yield tuple(p)


def _compositions_of(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in _compositions_of(n - first, k - 1):
            yield (first,) + rest


def psi_elements(psi: OperadMorphism, max_arity: int = 5) -> PsiElements:
    return PsiElements.from_morphism(psi, max_arity)


def mutation_trials(psi: OperadMorphism, trials: int = 100, max_arity: int = 5,
                    seed: int = 0) -> List[Tuple[int, Hashable, Hashable, Fraction, bool]]:
    """Perturb a single coefficient of some Ψ_n and record whether invariance
    or one of the two identities detects it."""
    rng = random.Random(seed)
    base = psi_elements(psi, max_arity)
    out = []
    for _ in range(trials):
        n = rng.randint(1, max_arity)
        p = rng.choice(base.P.basis(n))
        q = rng.choice(base.Q.basis(n))
        delta = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 2, 3]))
        m = base.mutated(n, p, q, delta)
        res = m.verify(max_arity, stop_at_first=True)
        out.append((n, p, q, delta, not all(res.values())))
    return out


# ---------------------------------------------------------------------------
# M_Ψ: L∞ → P ⊗_H Ω((S⁻¹)^c ⊗ Q^∨)
# ---------------------------------------------------------------------------

class MPsi:
    """The morphism M_Ψ together with its source and target operads."""

    def __init__(self, psi: OperadMorphism, arity_cap: int = 5, weight_cap: Optional[int] = None):
        P, Q = psi.target, psi.source
        self.psi = psi
        self.P, self.Q = P, Q
        self.arity_cap = arity_cap
        wcap = weight_cap or max(arity_cap - 1, 1)
        self.symmetric = Q.symmetric
        gen_q = As(arity_cap) if not Q.symmetric else Com(arity_cap)
        self.source = CobarOperad(gen_q, arity_cap, wcap, name="A∞" if not Q.symmetric else "L∞")
        self.omega = CobarOperad(Q, arity_cap, wcap)
        P_capped = _with_cap(P, arity_cap)
        self.target = HadamardOperad(P_capped, self.omega)
        self._gen_images: Dict[int, Vector] = {}

    def gen_label(self, n: int):
        return ("g", ("a", n)) if not self.symmetric else ell(n)

    def generator_image(self, n: int) -> Vector:
        """M_Ψ(ℓ_n) = Σ_q (−1)^{n|Ψ(q)|} Ψ(q) ⊗ g_q."""
        if n not in self._gen_images:
            out: Vector = {}
            for q in self.Q.basis(n):
                t = corolla(("g", q), n)
                for p, c in self.psi(q).items():
                    out[(p, t)] = out.get((p, t), 0) + c * _sign(n * self.P.degree(p))
            self._gen_images[n] = {k: v for k, v in out.items() if v}
        return self._gen_images[n]

    def generator_terms(self, n: int) -> List[Tuple[Hashable, Hashable, Fraction]]:
        return [(p, t[0], c) for (p, t), c in self.generator_image(n).items()]

    def apply_tree(self, T) -> Vector:
        """Decorate every vertex of an L∞ tree with Ψ_n, separate the P and
        cobar labels (Koszul sign), compose the P side and keep the cobar
        tree as it is."""
        if is_leaf(T):
            return self.target.unit()
        paths = vertex_paths(T)
        options = [self.generator_terms(subtree(T, p)[0][1][1] if self.symmetric
                                        else self.source.G.arity(subtree(T, p)[0]))
                   for p in paths]
        out: Vector = {}
        for choice in product(*options):
            coeff = ONE
            ptree, gtree = T, T
            e = 0
            for idx, (path, (p, g, c)) in enumerate(zip(paths, choice)):
                coeff *= c
                node = subtree(T, path)
                ptree = _relabel_at(ptree, path, p)
                gtree = _relabel_at(gtree, path, g)
            # (p_1⊗g_1)⊗(p_2⊗g_2)⊗… → (p_1⊗p_2⊗…)⊗(g_1⊗g_2⊗…)
            for v in range(len(choice)):
                for u in range(v):
                    e += self.omega.G.degree(choice[u][1]) * self.P.degree(choice[v][0])
            coeff *= _sign(e)
            pval = eval_tree(ptree, self.target.P)
            for pk, cp in pval.items():
                key = (pk, gtree)
                out[key] = out.get(key, 0) + coeff * cp
        return {k: v for k, v in out.items() if v}

    def apply(self, X: Vector) -> Vector:
        out: Vector = {}
        for T, c in X.items():
            vadd(out, self.apply_tree(T), c)
        return out

    def apply_free(self, X: Vector) -> Vector:
        """Oracle: free extension, evaluating trees inside P ⊗_H Ω."""
        src = self.source

        def label_map(lab):
            return self.generator_image(src.G.arity(lab))

        out: Vector = {}
        for T, c in X.items():
            vadd(out, eval_tree(T, self.target, label_map, src.G.degree), c)
        return out

    def chain_defect(self, n: int) -> Vector:
        """d(M_Ψ(ℓ_n)) − M_Ψ(dℓ_n)."""
        lab = self.gen_label(n)
        lhs = self.target.d_vec(self.generator_image(n))
        rhs = self.apply(self.source._gen_d(lab))
        vadd(lhs, rhs, -1)
        return {k: v for k, v in lhs.items() if v}

    def is_chain_map(self, max_arity: Optional[int] = None) -> bool:
        return all(not self.chain_defect(n) for n in range(2, (max_arity or self.arity_cap) + 1))


def _relabel_at(t, path, label):
    node = subtree(t, path)
    from .tree_calculus import replace_at
    return replace_at(t, path, (label, node[1]))


class _CappedView(Operad):
    """The same operad seen with a different arity cap (for Hadamard products)."""

    def __init__(self, P: Operad, cap: int):
        super().__init__()
        self.inner = P
        self.arity_cap = cap
        self.symmetric = P.symmetric
        self.name = P.name

    def basis(self, n):
        return self.inner.basis(n) if n <= self.arity_cap else []

    def arities(self):
        return range(1, self.arity_cap + 1)

    def degree(self, key):
        return self.inner.degree(key)

    def arity(self, key):
        return self.inner.arity(key)

    def unit(self):
        return self.inner.unit()

    def compose(self, x, i, y):
        return self.inner.compose(x, i, y)

    def act(self, x, perm):
        return self.inner.act(x, perm)

    def d(self, x):
        return self.inner.d(x)


def _with_cap(P: Operad, cap: int) -> Operad:
    return P if getattr(P, "arity_cap", None) == cap else _CappedView(P, cap)


def m_psi(psi: OperadMorphism, arity_cap: int = 5, weight_cap: Optional[int] = None) -> MPsi:
    return MPsi(psi, arity_cap, weight_cap)


def m_psi_ns(psi: OperadMorphism, arity_cap: int = 5, weight_cap: Optional[int] = None) -> MPsi:
    if psi.source.symmetric:
        raise ValueError("ns variant needs a non-symmetric morphism")
    return MPsi(psi, arity_cap, weight_cap)


# ---------------------------------------------------------------------------
# closed forms and compositions
# ---------------------------------------------------------------------------

def cobar_morphism_from_dual(theta: OperadMorphism, source: CobarOperad, target: CobarOperad):
    """Ω(Θ^∨): Ω((S⁻¹)^c⊗R^∨) → Ω((S⁻¹)^c⊗Q^∨) for Θ: Q → R,
    g_r ↦ Σ_q ⟨r^∨, Θ(q)⟩ g_q."""
    table: Dict[Hashable, Vector] = {}
    for n in range(2, source.arity_cap + 1):
        for q in theta.source.basis(n):
            for r, c in theta(q).items():
                lab = ("g", r)
                acc = table.setdefault(lab, {})
                t = corolla(("g", q), n)
                acc[t] = acc.get(t, 0) + c

    def label_map(lab):
        return table.get(lab, {})

    def f(X: Vector) -> Vector:
        out: Vector = {}
        for T, c in X.items():
            vadd(out, eval_tree(T, target, label_map, source.G.degree), c)
        return {k: v for k, v in out.items() if v}

    return f


def apply_left(psi: OperadMorphism, X: Vector) -> Vector:
    """(Ψ ⊗ 1) on a Hadamard element."""
    out: Vector = {}
    for (p, t), c in X.items():
        for p2, c2 in psi(p).items():
            out[(p2, t)] = out.get((p2, t), 0) + c * c2
    return {k: v for k, v in out.items() if v}


def apply_right(f: Callable[[Vector], Vector], X: Vector) -> Vector:
    """(1 ⊗ f) on a Hadamard element, f of degree 0."""
    out: Vector = {}
    for (p, t), c in X.items():
        for t2, c2 in f({t: ONE}).items():
            out[(p, t2)] = out.get((p, t2), 0) + c * c2
    return {k: v for k, v in out.items() if v}


def closed_form_id_com(M: MPsi, n: int) -> Vector:
    return {(("mu", n), corolla(ell(n), n)): ONE}


def closed_form_id_ass(M: MPsi, n: int) -> Vector:
    """Σ_σ (−1)^σ (m_id ⊗ m̄_id)^σ."""
    m_id = ("m", tuple(range(n)))
    base = {(m_id, corolla(("g", m_id), n)): ONE}
    out: Vector = {}
    for sigma in all_perms(n):
        vadd(out, M.target.act_vec(base, sigma), perm_sign(sigma))
    return out


def closed_form_u(M: MPsi, n: int) -> Vector:
    """μ_n ⊗ Σ_σ (−1)^σ (m̄_id)^σ."""
    m_id = ("m", tuple(range(n)))
    out: Vector = {}
    for sigma in all_perms(n):
        for t, c in M.omega.act_vec({corolla(("g", m_id), n): ONE}, sigma).items():
            key = (("mu", n), t)
            out[key] = out.get(key, 0) + c * perm_sign(sigma)
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# M̄_Ψ: L∞ → hom(B(S⊗Q), P)
# ---------------------------------------------------------------------------

def generator_sign(n: int) -> int:
    """(−1)^{n−1+n(n−1)/2}."""
    return _sign(n - 1 + n * (n - 1) // 2)


class MBarPsi:
    """M̄_Ψ(T) as a functional on the bar construction B(S ⊗ Q).

    M̄_Ψ(ℓ_n)(s(S_n ⊗ q)) = (−1)^{n−1+n(n−1)/2} Ψ(q) on weight one, zero on
    higher weight.  On a tree T of generators, M̄_Ψ(T) is non-zero only on
    bar trees of the same shape, where it applies the vertex functionals
    (Koszul sign (−1)^{Σ_{u>v}|f_u||x_v|}) and composes in P."""

    def __init__(self, psi: OperadMorphism, arity_cap: int = 5, weight_cap: int = 2):
        self.psi = psi
        self.P, self.Q = psi.target, psi.source
        self.SQ = operadic_suspension(_with_cap(self.Q, arity_cap))
        self.bar = BarConstruction(self.SQ, arity_cap, weight_cap)
        self.source = CobarOperad(Com(arity_cap) if self.Q.symmetric else As(arity_cap),
                                  arity_cap, max(arity_cap - 1, 1))
        self.arity_cap = arity_cap

    def vertex_value(self, n: int, xlabel) -> Vector:
        # xlabel = ("s", (("S", n), q))
        q = xlabel[1][1]
        return vscale(self.psi(q), generator_sign(n))

    def value(self, T, b) -> Vector:
        if _shape(T) != _shape(b):
            return {}
        paths = vertex_paths(T)
        fdeg = [self.source.G.degree(subtree(T, p)[0]) for p in paths]
        xlabs = [subtree(b, p)[0] for p in paths]
        xdeg = [self.bar.L.degree(x) for x in xlabs]
        e = sum(fdeg[u] * xdeg[v] for v in range(len(paths)) for u in range(v + 1, len(paths)))
        # build the P-tree with vertex values, expanding sums
        options = [list(self.vertex_value(self.source.G.arity(subtree(T, p)[0]), x).items())
                   for p, x in zip(paths, xlabs)]
        out: Vector = {}
        for choice in product(*options):
            coeff = _sign(e)
            ptree = b
            for path, (pk, c) in zip(paths, choice):
                coeff *= c
                ptree = _relabel_at(ptree, path, pk)
            vadd(out, eval_tree(ptree, self.P), coeff)
        return {k: v for k, v in out.items() if v}

    def value_vec(self, X: Vector, B: Vector) -> Vector:
        out: Vector = {}
        for T, c in X.items():
            for b, cb in B.items():
                vadd(out, self.value(T, b), c * cb)
        return {k: v for k, v in out.items() if v}

    def chain_defect(self, n: int, b) -> Vector:
        """∂(M̄(ℓ_n))(b) − M̄(dℓ_n)(b), with ∂f = d_P f − (−1)^{|f|} f d_B."""
        lab = ell(n) if self.Q.symmetric else a_gen(n)
        gen = {corolla(lab, n): ONE}
        lhs = vscale(self.value_vec(gen, self.bar.d_vec({b: ONE})), -_sign(n - 2))
        vadd(lhs, self.value_vec(self.source._gen_d(lab), {b: ONE}), -1)
        return {k: v for k, v in lhs.items() if v}

    def pairing(self, gtree, b) -> Fraction:
        """⟨cobar tree, bar tree⟩ with ⟨g_q, s(S_n⊗q')⟩ = (−1)^{n−1+n(n−1)/2} δ_{q,q'}."""
        if _shape(gtree) != _shape(b):
            return Fraction(0)
        paths = vertex_paths(gtree)
        gl = [subtree(gtree, p)[0] for p in paths]
        xl = [subtree(b, p)[0] for p in paths]
        val = Fraction(1)
        for g, x in zip(gl, xl):
            if g[1] != x[1][1]:
                return Fraction(0)
            val *= generator_sign(self.bar.P.arity(x[1]))
        gdeg = [self.Q.arity(g[1]) - 2 - self.Q.degree(g[1]) for g in gl]
        xdeg = [self.bar.L.degree(x) for x in xl]
        e = sum(gdeg[u] * xdeg[v] for v in range(len(paths)) for u in range(v + 1, len(paths)))
        return val * _sign(e)


def _shape(t):
    if is_leaf(t):
        return t
    return (None, tuple(_shape(c) for c in t[1]))


def mbar_psi(psi: OperadMorphism, arity_cap: int = 5, weight_cap: int = 2) -> MBarPsi:
    return MBarPsi(psi, arity_cap, weight_cap)


def duality_defect(M: MPsi, Mbar: MBarPsi, T, b) -> Vector:
    """M̄_Ψ(T)(b) − Σ p ⟨M_Ψ(T)_p, b⟩."""
    lhs = Mbar.value(T, b)
    for (p, gtree), c in M.apply_tree(T).items():
        val = Mbar.pairing(gtree, b)
        if val:
            lhs[p] = lhs.get(p, 0) - c * val
    return {k: v for k, v in lhs.items() if v}


# ---------------------------------------------------------------------------
# Manin morphisms
# ---------------------------------------------------------------------------

_DATA = {"Com": com_data, "Lie": lie_data, "Ass": ass_data}


class ManinMorphism:
    """m_Ψ: Lie → P ⊗_H Q^!, b ↦ Σ_f Ψ(f) ⊗ [g_f] over a basis f of Q(2)."""

    def __init__(self, psi: OperadMorphism, arity_cap: int = 4):
        self.psi = psi
        self.P, self.Q = psi.target, psi.source
        if self.Q.name not in _DATA:
            raise ValueError("Manin morphisms need a stock binary quadratic source")
        self.Qpres = PresentedOperad(_DATA[self.Q.name](), arity_cap)
        self.Qdual = koszul_dual_operad(self.Qpres, arity_cap)
        self.target = HadamardOperad(_with_cap(self.P, arity_cap), self.Qdual)
        self.arity_cap = arity_cap

    def image_of_b(self) -> Vector:
        out: Vector = {}
        for f in self.Q.basis(2):
            for p, c in self.psi(f).items():
                for t, ct in self.Qdual.generator(("g", f)).items():
                    out[(p, t)] = out.get((p, t), 0) + c * ct
        return {k: v for k, v in out.items() if v}

    def jacobi_image(self) -> Vector:
        """Image of the Jacobi relation; zero iff m_Ψ is well defined."""
        rel = lie_data().relations[0]
        img = self.image_of_b()
        out: Vector = {}
        for T, c in rel.items():
            vadd(out, eval_tree(T, self.target, lambda lab: img), c)
        return {k: v for k, v in out.items() if v}

    def is_well_defined(self) -> bool:
        return not self.jacobi_image()


def manin_morphism(psi: OperadMorphism, arity_cap: int = 4) -> ManinMorphism:
    m = ManinMorphism(psi, arity_cap)
    if not m.is_well_defined():
        raise ValueError(f"{psi.name} does not preserve the quadratic relations")
    return m


def manin_factorisation_holds(psi: OperadMorphism, arity_cap: int = 4) -> bool:
    """m_Ψ = (Ψ ⊗ 1) m_Q on the generator b."""
    m = ManinMorphism(psi, arity_cap)
    mq = ManinMorphism(identity_morphism(psi.source, "id"), arity_cap)
    return m.image_of_b() == apply_left(psi, mq.image_of_b())


def manin_square(psi: OperadMorphism, arity_cap: int = 4) -> Dict[int, Tuple[Vector, Vector]]:
    """For each n: (route through P⊗Q^!_∞, route through Lie) images of ℓ_n."""
    M = MPsi(psi, arity_cap)
    mm = ManinMorphism(psi, arity_cap)
    can = canonical_map_to_dual(M.omega, mm.Qdual)
    out = {}
    for n in range(2, arity_cap + 1):
        route1 = apply_right(can, M.generator_image(n))
        route2 = mm.image_of_b() if n == 2 else {}
        out[n] = (route1, route2)
    return out
