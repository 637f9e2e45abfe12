"""
Concrete operads: Com, Ass, Lie, the non-symmetric As, the suspension
operads S and S⁻¹, endomorphism operads, Hadamard products, operadic
suspension, quadratic presentations and Koszul duals, convolution operads
and their algebras.

Conventions shared by every operad in the package:

* permutations are 0-based image tuples, composed as (στ)(k) = σ(τ(k));
* the right action reads x^σ(a_0, …) = x(a_{σ^{-1}(0)}, …), so slot s of x
  reads argument σ^{-1}(s);
* partial compositions ∘_i use 1-based slots.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .exact_core import (ONE, GradedSpace, RowReducer, Vector, all_perms, koszul_sign,
                         perm_compose, perm_inverse, perm_sign, vadd, vscale)
from .operad_base import Operad, SModule
from .tree_calculus import (FreeOperad, arity_of, corolla, enumerate_trees, eval_tree, is_leaf,
                            leaves, subtree, vertex_labels, vertex_paths, weight)


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


# ---------------------------------------------------------------------------
# Com, Ass, As
# ---------------------------------------------------------------------------

class Com(Operad):
    """Commutative operad: one operation μ_n in each arity, trivial action."""

    name = "Com"

    def __init__(self, arity_cap: int = 5):
        super().__init__()
        self.arity_cap = arity_cap

    def basis(self, n):
        return [("mu", n)] if 1 <= n <= self.arity_cap else []

    def arities(self):
        return range(1, self.arity_cap + 1)

    def degree(self, key):
        return 0

    def arity(self, key):
        return key[1]

    def unit(self):
        return {("mu", 1): ONE}

    def _compose(self, x, i, y):
        return {("mu", x[1] + y[1] - 1): ONE}

    def _act(self, x, perm):
        return {x: ONE}


class Ass(Operad):
    """Associative operad.  The basis element ("m", w) is the product
    x_{w_0} x_{w_1} … of the inputs read in the order of the word w; the
    operation m_σ of the regular representation has w = σ^{-1}."""

    name = "Ass"

    def __init__(self, arity_cap: int = 5):
        super().__init__()
        self.arity_cap = arity_cap

    def basis(self, n):
        if not 1 <= n <= self.arity_cap:
            return []
        return [("m", w) for w in all_perms(n)]

    def arities(self):
        return range(1, self.arity_cap + 1)

    def degree(self, key):
        return 0

    def arity(self, key):
        return len(key[1])

    def unit(self):
        return {("m", (0,)): ONE}

    @staticmethod
    def m_sigma(sigma) -> Tuple:
        return ("m", perm_inverse(sigma))

    def _compose(self, x, i, y):
        w, u = x[1], y[1]
        n2 = len(u)
        out = []
        for a in w:
            if a < i - 1:
                out.append(a)
            elif a == i - 1:
                out.extend(b + i - 1 for b in u)
            else:
                out.append(a + n2 - 1)
        return {("m", tuple(out)): ONE}

    def _act(self, x, perm):
        inv = perm_inverse(perm)
        return {("m", tuple(inv[a] for a in x[1])): ONE}


class As(Operad):
    """Non-symmetric associative operad: one operation a_n per arity."""

    name = "As"
    symmetric = False

    def __init__(self, arity_cap: int = 5):
        super().__init__()
        self.arity_cap = arity_cap

    def basis(self, n):
        return [("a", n)] if 1 <= n <= self.arity_cap else []

    def arities(self):
        return range(1, self.arity_cap + 1)

    def degree(self, key):
        return 0

    def arity(self, key):
        return key[1]

    def unit(self):
        return {("a", 1): ONE}

    def _compose(self, x, i, y):
        return {("a", x[1] + y[1] - 1): ONE}


# ---------------------------------------------------------------------------
# Lie, realised inside Ass
# ---------------------------------------------------------------------------

class Lie(Operad):
    """Lie operad as the suboperad of Ass generated by b = m_id − m_(12).

    Basis ("b", n, a) is the left-normed comb [[…[x_0, x_{a_1}], …], x_{a_{n−1}}]
    for a a permutation of 1..n−1.  The comb is the only basis element whose
    expansion contains a word starting with x_0 followed by a, so coordinates
    are read off those words."""

    name = "Lie"

    def __init__(self, arity_cap: int = 5):
        super().__init__()
        self.arity_cap = arity_cap
        self.ass = Ass(arity_cap + 1)
        self._expand: Dict = {}

    def basis(self, n):
        if not 1 <= n <= self.arity_cap:
            return []
        return [("b", n, tuple(a)) for a in _perms_of(tuple(range(1, n)))]

    def arities(self):
        return range(1, self.arity_cap + 1)

    def degree(self, key):
        return 0

    def arity(self, key):
        return key[1]

    def unit(self):
        return {("b", 1, ()): ONE}

    def expand(self, key) -> Vector:
        """The comb as an element of Ass."""
        r = self._expand.get(key)
        if r is None:
            words: Dict[Tuple[int, ...], int] = {(0,): 1}
            for a in key[2]:
                nxt: Dict[Tuple[int, ...], int] = {}
                for w, c in words.items():
                    nxt[w + (a,)] = nxt.get(w + (a,), 0) + c
                    nxt[(a,) + w] = nxt.get((a,) + w, 0) - c
                words = nxt
            r = {("m", w): Fraction(c) for w, c in words.items() if c}
            self._expand[key] = r
        return r

    def coordinates(self, X: Vector) -> Vector:
        """Read an Ass element known to lie in Lie back in the comb basis."""
        out: Vector = {}
        for (tag, w), c in X.items():
            if w[0] == 0 and c:
                out[("b", len(w), w[1:])] = c
        return out

    def to_ass(self, X: Vector) -> Vector:
        out: Vector = {}
        for k, c in X.items():
            vadd(out, self.expand(k), c)
        return out

    def _compose(self, x, i, y):
        return self.coordinates(self.ass.compose_vec(self.expand(x), i, self.expand(y)))

    def _act(self, x, perm):
        return self.coordinates(self.ass.act_vec(self.expand(x), perm))


def _perms_of(items: Tuple[int, ...]):
    from itertools import permutations
    return sorted(permutations(items))


# ---------------------------------------------------------------------------
# endomorphism operads and the suspension operads
# ---------------------------------------------------------------------------

class EndOperad(Operad):
    """End_V: basis ("E", out, ins) is the multilinear map sending the
    basis tensor v_{ins_0} ⊗ … to v_out and every other basis tensor to 0."""

    name = "End"

    def __init__(self, V: GradedSpace, arity_cap: int = 4):
        super().__init__()
        self.V = V
        self.arity_cap = arity_cap
        self._degs = V.degrees()

    def basis(self, n):
        if not 1 <= n <= self.arity_cap:
            return []
        dim = self.V.dim
        return [("E", o, ins) for o in range(dim) for ins in product(range(dim), repeat=n)]

    def arities(self):
        return range(1, self.arity_cap + 1)

    def degree(self, key):
        return self._degs[key[1]] - sum(self._degs[a] for a in key[2])

    def arity(self, key):
        return len(key[2])

    def unit(self):
        return {("E", a, (a,)): ONE for a in range(self.V.dim)}

    def _compose(self, x, i, y):
        _, o1, I1 = x
        _, o2, I2 = y
        if I1[i - 1] != o2:
            return {}
        e = self.degree(y) * sum(self._degs[a] for a in I1[:i - 1])
        return {("E", o1, I1[:i - 1] + I2 + I1[i:]): Fraction(_sign(e))}

    def _act(self, x, perm):
        _, o, I = x
        J = tuple(I[perm[k]] for k in range(len(I)))
        return {("E", o, J): Fraction(koszul_sign(perm, [self._degs[a] for a in J]))}

    def d(self, x) -> Vector:
        _, o, I = x
        out: Vector = {}
        # d_V ∘ f
        for t in range(self.V.dim):
            c = self.V.d_map().entries.get((t, o))
            if c:
                vadd(out, {("E", t, I): ONE}, c)
        # −(−1)^{|f|} f ∘ d_{V^{⊗n}}: f∘d picks up v_s ↦ c·v_{I_k}
        sgn = -_sign(self.degree(x))
        before = 0
        for k, a in enumerate(I):
            for s in range(self.V.dim):
                c = self.V.d_map().entries.get((a, s))
                if c:
                    vadd(out, {("E", o, I[:k] + (s,) + I[k + 1:]): ONE}, sgn * c * _sign(before))
            before += self._degs[a]
        return {k: v for k, v in out.items() if v}

    # evaluation on basis tensors, used by algebra-level code
    def evaluate(self, key, inputs: Sequence[int]) -> Vector:
        _, o, I = key
        return {o: ONE} if tuple(inputs) == I else {}


class SuspensionOperad(Operad):
    """S = End_{ks} (shift=+1) or S⁻¹ = End_{ks⁻¹} (shift=−1), one element
    per arity, of degree ±(1−n) and with the sign action."""

    def __init__(self, shift: int = 1, arity_cap: int = 6):
        super().__init__()
        if shift not in (1, -1):
            raise ValueError("shift must be ±1")
        self.shift = shift
        self.arity_cap = arity_cap
        self.name = "S" if shift == 1 else "S^-1"
        self.tag = "S" if shift == 1 else "S-"

    def basis(self, n):
        return [(self.tag, n)] if 1 <= n <= self.arity_cap else []

    def arities(self):
        return range(1, self.arity_cap + 1)

    def degree(self, key):
        return self.shift * (1 - key[1])

    def arity(self, key):
        return key[1]

    def unit(self):
        return {(self.tag, 1): ONE}

    def _compose(self, x, i, y):
        n2 = y[1]
        return {(self.tag, x[1] + n2 - 1): Fraction(_sign((i - 1) * (n2 - 1)))}

    def _act(self, x, perm):
        return {x: Fraction(perm_sign(perm))}


def suspension_operad(arity_cap: int = 6) -> SuspensionOperad:
    return SuspensionOperad(1, arity_cap)


def inverse_suspension_operad(arity_cap: int = 6) -> SuspensionOperad:
    return SuspensionOperad(-1, arity_cap)


def endomorphism_operad(V: GradedSpace, arity_cap: int = 4) -> EndOperad:
    return EndOperad(V, arity_cap)


# ---------------------------------------------------------------------------
# Hadamard products and operadic suspension
# ---------------------------------------------------------------------------

class HadamardModule(SModule):
    def __init__(self, M: SModule, N: SModule):
        if getattr(M, "arity_cap", None) != getattr(N, "arity_cap", None):
            raise ValueError("hadamard product needs equal arity caps")
        self.M, self.N = M, N
        self.arity_cap = M.arity_cap
        self.symmetric = M.symmetric and N.symmetric
        self.name = f"{M.name}⊗{N.name}"

    def basis(self, n):
        return [(a, b) for a in self.M.basis(n) for b in self.N.basis(n)]

    def arities(self):
        return range(1, self.arity_cap + 1)

    def degree(self, key):
        return self.M.degree(key[0]) + self.N.degree(key[1])

    def arity(self, key):
        return self.M.arity(key[0])

    def act(self, key, perm):
        out: Vector = {}
        for a, ca in self.M.act(key[0], perm).items():
            for b, cb in self.N.act(key[1], perm).items():
                out[(a, b)] = out.get((a, b), 0) + ca * cb
        return {k: v for k, v in out.items() if v}


class HadamardOperad(Operad):
    """Arity-wise tensor product P ⊗_H O of two operads."""

    def __init__(self, P: Operad, O: Operad, arity_cap: Optional[int] = None):
        super().__init__()
        capP, capO = getattr(P, "arity_cap", None), getattr(O, "arity_cap", None)
        if arity_cap is None:
            if capP != capO:
                raise ValueError(f"hadamard product needs equal arity caps ({capP} vs {capO})")
            arity_cap = capP
        self.P, self.O = P, O
        self.arity_cap = arity_cap
        self.symmetric = P.symmetric and O.symmetric
        self.name = f"{P.name}⊗{O.name}"

    def basis(self, n):
        if n > self.arity_cap:
            return []
        return [(a, b) for a in self.P.basis(n) for b in self.O.basis(n)]

    def arities(self):
        return range(1, self.arity_cap + 1)

    def degree(self, key):
        return self.P.degree(key[0]) + self.O.degree(key[1])

    def arity(self, key):
        return self.P.arity(key[0])

    def unit(self):
        return tensor_vectors(self.P.unit(), self.O.unit())

    def _compose(self, x, i, y):
        (p, a), (q, b) = x, y
        sign = _sign(self.O.degree(a) * self.P.degree(q))
        left = self.P.compose(p, i, q)
        if not left:
            return {}
        return vscale(tensor_vectors(left, self.O.compose(a, i, b)), sign)

    def _act(self, x, perm):
        return tensor_vectors(self.P.act(x[0], perm), self.O.act(x[1], perm))

    def d(self, x):
        p, a = x
        out = tensor_vectors(self.P.d(p), {a: ONE})
        vadd(out, tensor_vectors({p: ONE}, self.O.d(a)), _sign(self.P.degree(p)))
        return out


def tensor_vectors(X: Vector, Y: Vector) -> Vector:
    out: Vector = {}
    for a, ca in X.items():
        for b, cb in Y.items():
            c = ca * cb
            if c:
                out[(a, b)] = out.get((a, b), 0) + c
    return {k: v for k, v in out.items() if v}


def hadamard(M, N):
    """Hadamard product of two operads (or of two S-modules)."""
    if isinstance(M, Operad) and isinstance(N, Operad):
        return HadamardOperad(M, N)
    return HadamardModule(M, N)


def operadic_suspension(P: Operad, inverse: bool = False) -> HadamardOperad:
    """S ⊗_H P (or S⁻¹ ⊗_H P): degrees shift by ±(n−1), action twisted by
    the sign representation."""
    cap = P.arity_cap
    S = SuspensionOperad(-1 if inverse else 1, cap)
    return HadamardOperad(S, P)


def suspension_power_sign(n: int) -> int:
    """Sign relating the two natural generators of the arity-n component
    of the suspension cooperad, (−1)^{n(n−1)/2}, computed by evaluating the
    desuspension tensor power on the suspension tensor power."""
    from .exact_core import desuspension_power_sign
    return desuspension_power_sign(n)


# ---------------------------------------------------------------------------
# quadratic presentations
# ---------------------------------------------------------------------------

class GeneratorModule(SModule):
    """Finite S-module of generators: labels with arity, degree and action
    given by an explicit function or by per-label transposition matrices."""

    def __init__(self, gens: Sequence[Tuple[Hashable, int, int]],
                 action: Optional[Callable[[Hashable, Tuple[int, ...]], Vector]] = None,
                 symmetric: bool = True, name: str = "E"):
        self.gens = list(gens)
        self._arity = {g: a for g, a, _ in gens}
        self._degree = {g: d for g, _, d in gens}
        self.symmetric = symmetric
        self._action = action
        self.name = name
        self.arity_cap = max((a for _, a, _ in gens), default=1)

    def basis(self, n):
        return [g for g, a, _ in self.gens if a == n]

    def arities(self):
        return sorted({a for _, a, _ in self.gens})

    def degree(self, key):
        return self._degree[key]

    def arity(self, key):
        return self._arity[key]

    def act(self, key, perm):
        perm = tuple(perm)
        if perm == tuple(range(len(perm))):
            return {key: ONE}
        if self._action is None:
            raise ValueError("generator module has no action")
        return self._action(key, perm)


class QuadraticData:
    """Generators E (binary) and relations R ⊂ T(E)(3) given by a spanning
    set of tree polynomials."""

    def __init__(self, E: GeneratorModule, relations: Sequence[Vector], name: str = "P"):
        self.E = E
        self.relations = [dict(r) for r in relations]
        self.name = name
        self._check()

    def weight_two_trees(self) -> List:
        return enumerate_trees(self.E, 3, 2, self.E.symmetric, min_weight=2)

    def _check(self):
        if not self.E.symmetric:
            return
        free = FreeOperad(self.E, 3, 2)
        red = RowReducer(order=repr)
        for r in self.relations:
            red.add(r)
        for i, r in enumerate(self.relations):
            for perm in ((1, 0, 2), (0, 2, 1)):
                if not red.contains(free.act_vec(r, perm)):
                    raise ValueError(f"relation {i} is not stable under the symmetric group "
                                     f"(its image under {perm} leaves the span)")


def left_comb_order(tree) -> Tuple:
    """Ordering key making left-combed trees smallest (they survive as the
    quotient basis when pivots are taken at the largest column)."""
    return (0 if _is_left_comb(tree) else 1, repr(tree))


def _is_left_comb(t) -> bool:
    if is_leaf(t):
        return True
    kids = t[1]
    for j, c in enumerate(kids):
        if not is_leaf(c) and j != 0:
            return False
    return _is_left_comb(kids[0])


class PresentedOperad(Operad):
    """P(E, R) = T(E)/(R), truncated at `arity_cap`.

    The ideal (R)(n) is spanned by trees with exactly one vertex labelled by
    a relation; since R is S-stable, a basis of R suffices.  Normal forms
    are obtained by full reduction modulo the ideal; the quotient basis is
    the set of non-pivot trees."""

    def __init__(self, data: QuadraticData, arity_cap: int = 4):
        super().__init__()
        self.data = data
        self.E = data.E
        self.symmetric = data.E.symmetric
        self.arity_cap = arity_cap
        self.name = data.name
        self.free = FreeOperad(self.E, arity_cap, arity_cap - 1, name=f"T({data.name})")
        self._reducers: Dict[int, RowReducer] = {}
        self._basis: Dict[int, List] = {}

    # ideal and quotient ---------------------------------------------------
    def ideal(self, n: int) -> RowReducer:
        if n in self._reducers:
            return self._reducers[n]
        red = RowReducer(order=left_comb_order)
        if n >= 3:
            rel_basis = RowReducer(order=left_comb_order)
            for r in self.data.relations:
                rel_basis.add(r)
            rels = list(rel_basis.rows.values())
            # trees with one ternary placeholder vertex, generators elsewhere
            holder = _Placeholder(self.E)
            for t in enumerate_trees(holder, n, n - 2, self.symmetric, min_weight=n - 2):
                paths = [p for p in vertex_paths(t) if subtree(t, p)[0] == _HOLE]
                if len(paths) != 1:
                    continue
                for r in rels:
                    red.add(self.free.substitute(t, paths[0], r))
        self._reducers[n] = red
        return red

    def basis(self, n):
        if n in self._basis:
            return self._basis[n]
        if not 1 <= n <= self.arity_cap:
            return []
        trees = enumerate_trees(self.E, n, n - 1, self.symmetric, min_weight=n - 1)
        if n == 1:
            trees = [0]
        piv = set(self.ideal(n).pivots())
        self._basis[n] = sorted((t for t in trees if t not in piv), key=left_comb_order)
        return self._basis[n]

    def arities(self):
        return range(1, self.arity_cap + 1)

    def degree(self, t):
        return self.free.degree(t)

    def arity(self, t):
        return arity_of(t)

    def unit(self):
        return {0: ONE}

    def normal_form(self, X: Vector) -> Vector:
        if not X:
            return {}
        n = arity_of(next(iter(X)))
        if n < 3:
            return {k: v for k, v in X.items() if v}
        return self.ideal(n).reduce(X)

    def project(self, X: Vector) -> Vector:
        """Quotient map T(E) → P(E, R)."""
        return self.normal_form(X)

    def _compose(self, x, i, y):
        return self.normal_form(self.free.compose(x, i, y))

    def _act(self, x, perm):
        return self.normal_form(self.free.act(x, perm))

    def generator(self, label) -> Vector:
        return {corolla(label, self.E.arity(label)): ONE}


_HOLE = ("__relation__",)


class _Placeholder(SModule):
    def __init__(self, E: GeneratorModule):
        self.E = E
        self.symmetric = E.symmetric

    def basis(self, n):
        if n == 2:
            return self.E.basis(2)
        if n == 3:
            return [_HOLE]
        return []

    def degree(self, key):
        return 0

    def arity(self, key):
        return 3 if key == _HOLE else 2


def presented_operad(data: QuadraticData, arity_cap: int = 4) -> PresentedOperad:
    return PresentedOperad(data, arity_cap)


# ---------------------------------------------------------------------------
# stock quadratic data
# ---------------------------------------------------------------------------

def _binary_trees(E: GeneratorModule):
    return enumerate_trees(E, 3, 2, E.symmetric, min_weight=2)


# generator labels coincide with the arity-2 basis keys of the stock operads
LIE_B = ("b", 2, (1,))


def com_generators() -> GeneratorModule:
    return GeneratorModule([(("mu", 2), 2, 0)], action=lambda k, p: {k: ONE}, name="E_Com")


def lie_generators() -> GeneratorModule:
    return GeneratorModule([(LIE_B, 2, 0)], action=lambda k, p: {k: Fraction(perm_sign(p))},
                           name="E_Lie")


def ass_generators() -> GeneratorModule:
    A = Ass(2)
    return GeneratorModule([(k, 2, 0) for k in A.basis(2)], action=lambda k, p: A.act(k, p),
                           name="E_Ass")


def com_data() -> QuadraticData:
    """μ₂ commutative, R spanned by the differences of the three binary trees."""
    E = com_generators()
    t = _binary_trees(E)
    return QuadraticData(E, [{t[0]: ONE, t[1]: -ONE}, {t[1]: ONE, t[2]: -ONE}], "Com")


def lie_data() -> QuadraticData:
    """b antisymmetric; R spanned by the Jacobi relation written on canonical
    trees: [[x0,x1],x2] − [[x0,x2],x1] − [x0,[x1,x2]]."""
    E = lie_generators()
    b = LIE_B
    u01 = (b, ((b, (0, 1)), 2))
    u02 = (b, ((b, (0, 2)), 1))
    u12 = (b, (0, (b, (1, 2))))
    return QuadraticData(E, [{u01: ONE, u02: -ONE, u12: -ONE}], "Lie")


def ass_data() -> QuadraticData:
    """Regular representation of S₂ with the S₃-orbit of associativity."""
    E = ass_generators()
    free = FreeOperad(E, 3, 2)
    m = ("m", (0, 1))
    assoc = {(m, ((m, (0, 1)), 2)): ONE, (m, (0, (m, (1, 2)))): -ONE}
    rels = [free.act_vec(assoc, p) for p in all_perms(3)]
    return QuadraticData(E, rels, "Ass")


def relations_from_operad(E: GeneratorModule, P: Operad, label_map=None) -> List[Vector]:
    """Kernel of T(E)(3) → P(3) at weight two, as tree polynomials."""
    from .exact_core import kernel_relations
    trees = _binary_trees(E)
    images = [eval_tree(t, P, label_map) for t in trees]
    return [{trees[i]: c for i, c in rel.items()} for rel in kernel_relations(images)]


def com(arity_cap: int = 5) -> Com:
    return Com(arity_cap)


def lie(arity_cap: int = 5) -> Lie:
    return Lie(arity_cap)


def ass(arity_cap: int = 5) -> Ass:
    return Ass(arity_cap)


def ns_as(arity_cap: int = 5) -> As:
    return As(arity_cap)


# ---------------------------------------------------------------------------
# Koszul dual
# ---------------------------------------------------------------------------

def _ternary_shape_sign(t) -> int:
    """Sign pairing a canonical two-vertex ternary tree with its dual.

    Written as (g₁∘₁g₂)^σ̃ the pairing carries (−1)^σ for the shuffle
    σ ∈ Sh(1,2) (leaf under the root first, then the upper vertex's leaves).
    The canonical tree differs from that form by swapping the root's
    children when the upper vertex is not the first child; the dual labels
    carry an extra sign under that swap."""
    direct = [c for c in t[1] if is_leaf(c)][0]
    inner = [c for c in t[1] if not is_leaf(c)][0]
    sign = perm_sign((direct,) + tuple(sorted(leaves(inner))))
    return -sign if is_leaf(t[1][0]) else sign


def dual_generators(E: GeneratorModule) -> GeneratorModule:
    """s⁻¹S₂⁻¹E^∨: labels ("g", e) of degree −|e|, action twisted by the sign
    and dualised: g_e^τ = sgn(τ) Σ_e' ⟨e^∨, e'^{τ^{-1}}⟩ g_e'."""
    gens = [(("g", e), E.arity(e), -E.degree(e)) for e in E.basis(2)]

    def action(key, perm):
        e = key[1]
        inv = perm_inverse(perm)
        sgn = perm_sign(perm)
        out: Vector = {}
        for e2 in E.basis(2):
            c = E.act(e2, inv).get(e)
            if c:
                out[("g", e2)] = Fraction(sgn) * c
        return out

    return GeneratorModule(gens, action=action, symmetric=E.symmetric, name=f"{E.name}^!")


def weight_two_pairing(t_dual, t, E: GeneratorModule) -> Fraction:
    """Pairing of a tree in T(E^!)(3) with a tree in T(E)(3): nonzero only
    on equal shapes with dual labels, weighted by the shape's shuffle sign."""
    if _shape_of(t_dual) != _shape_of(t):
        return Fraction(0)
    ld, lt = vertex_labels(t_dual), vertex_labels(t)
    if any(a[1] != b for a, b in zip(ld, lt)):
        return Fraction(0)
    # ⟨g1⊗g2, e1⊗e2⟩ = (−1)^{|g2||e1|}⟨g1,e1⟩⟨g2,e2⟩
    sign = _sign(E.degree(lt[1]) * E.degree(lt[0]))
    sign *= _ternary_shape_sign(t)
    return Fraction(sign)


def _shape_of(t):
    if is_leaf(t):
        return t
    return (None, tuple(_shape_of(c) for c in t[1]))


def annihilator(data: QuadraticData, E_dual: GeneratorModule) -> List[Vector]:
    from .exact_core import kernel_relations
    E = data.E
    trees = _binary_trees(E)
    dual_trees = _binary_trees(E_dual)
    # y ∈ R^⊥ iff Σ_t y_t ⟨t, r⟩ = 0 for every r ∈ R
    columns = []
    for td in dual_trees:
        col: Vector = {}
        for ri, r in enumerate(data.relations):
            val = sum((weight_two_pairing(td, t, E) * c for t, c in r.items()), Fraction(0))
            if val:
                col[ri] = val
        columns.append(col)
    return [{dual_trees[i]: c for i, c in rel.items()} for rel in kernel_relations(columns)]


def koszul_dual_operad(P, arity_cap: Optional[int] = None) -> PresentedOperad:
    """P^! = P(s⁻¹S₂⁻¹E^∨, R^⊥) for a binary quadratic presented operad."""
    data = P.data if isinstance(P, PresentedOperad) else P
    cap = arity_cap or (P.arity_cap if isinstance(P, PresentedOperad) else 4)
    if any(a != 2 for _, a, _ in data.E.gens):
        raise ValueError("Koszul dual needs binary generators")
    Ed = dual_generators(data.E)
    return PresentedOperad(QuadraticData(Ed, annihilator(data, Ed), f"{data.name}^!"), cap)


def same_relation_space(R1: Sequence[Vector], R2: Sequence[Vector]) -> bool:
    red1, red2 = RowReducer(order=repr), RowReducer(order=repr)
    for r in R1:
        red1.add(r)
    for r in R2:
        red2.add(r)
    return red1.rank == red2.rank and all(red1.contains(r) for r in R2)


def relabel_vector(X: Vector, f) -> Vector:
    from .tree_calculus import map_labels
    return {map_labels(t, f): c for t, c in X.items()}


def presented_morphism_is_iso(P: PresentedOperad, Q: Operad, label_map, arity_cap: int) -> bool:
    """Check that generators ↦ label_map defines an isomorphism P → Q up to
    the cap: relations vanish, and the images of P's basis are a basis."""
    from .exact_core import rank_of
    for r in P.data.relations:
        if eval_vectorised(r, Q, label_map):
            return False
    for n in range(1, arity_cap + 1):
        imgs = [eval_tree(t, Q, label_map) for t in P.basis(n)]
        if len(imgs) != Q.dim(n) or rank_of(imgs, order=repr) != Q.dim(n):
            return False
    return True


def eval_vectorised(X: Vector, Q: Operad, label_map) -> Vector:
    out: Vector = {}
    for t, c in X.items():
        vadd(out, eval_tree(t, Q, label_map), c)
    return out


# ---------------------------------------------------------------------------
# finite-dimensional dual cooperads and the convolution operad
# ---------------------------------------------------------------------------

class DualCooperad:
    """Q^∨ for an arity-wise finite-dimensional operad Q.  Basis keys are the
    keys of Q (standing for the dual basis); the partial decomposition is
    the transpose of ∘_i."""

    conilpotent = True

    def __init__(self, Q: Operad):
        self.Q = Q
        self.symmetric = Q.symmetric
        self.arity_cap = Q.arity_cap
        self.name = f"{Q.name}^∨"
        self._dec: Dict = {}

    def basis(self, n):
        return self.Q.basis(n)

    def degree(self, key):
        return -self.Q.degree(key)

    def arity(self, key):
        return self.Q.arity(key)

    def act(self, key, perm):
        # (f^σ)(x) = f(x^{σ^{-1}})
        inv = perm_inverse(perm)
        out: Vector = {}
        for x in self.Q.basis(len(perm)):
            c = self.Q.act(x, inv).get(key)
            if c:
                out[x] = c
        return out

    def decompose(self, key, m: int, i: int) -> List[Tuple[Fraction, Hashable, Hashable]]:
        """Δ_{(m,n,i)}(key^∨) = Σ (−1)^{|x||y|}⟨key^∨, x∘_i y⟩ x^∨ ⊗ y^∨."""
        ck = (key, m, i)
        if ck in self._dec:
            return self._dec[ck]
        n = self.Q.arity(key) - m + 1
        out = []
        for x in self.Q.basis(m):
            for y in self.Q.basis(n):
                c = self.Q.compose(x, i, y).get(key)
                if c:
                    out.append((c * _sign(self.Q.degree(x) * self.Q.degree(y)), x, y))
        self._dec[ck] = out
        return out


class ConvolutionOperad(Operad):
    """hom(C, P) for a finite-dimensional cooperad C: basis ("hom", c, p) is
    the map c ↦ p vanishing on the other basis elements of C."""

    def __init__(self, C: DualCooperad, P: Operad):
        super().__init__()
        if C.arity_cap != P.arity_cap:
            raise ValueError("convolution operad needs equal arity caps")
        self.C, self.P = C, P
        self.symmetric = C.symmetric and P.symmetric
        self.arity_cap = P.arity_cap
        self.name = f"hom({C.name},{P.name})"

    def basis(self, n):
        return [("hom", c, p) for c in self.C.basis(n) for p in self.P.basis(n)]

    def arities(self):
        return range(1, self.arity_cap + 1)

    def degree(self, key):
        return self.P.degree(key[2]) - self.C.degree(key[1])

    def arity(self, key):
        return self.P.arity(key[2])

    def unit(self):
        out: Vector = {}
        for c in self.C.basis(1):
            # unit sends the counit direction to the unit of P
            if self.C.Q.unit().get(c):
                for p, cp in self.P.unit().items():
                    out[("hom", c, p)] = self.C.Q.unit()[c] * cp
        return out

    def _compose(self, f, i, g):
        _, cf, pf = f
        _, cg, pg = g
        m, n = self.C.arity(cf), self.C.arity(cg)
        out: Vector = {}
        for c in self.C.basis(m + n - 1):
            for coeff, c1, c2 in self.C.decompose(c, m, i):
                if c1 != cf or c2 != cg:
                    continue
                # (f∘_i g)(c) = Σ (−1)^{|g||c1|} f(c1) ∘_i g(c2)
                s = _sign(self.degree(g) * self.C.degree(c1))
                for p, cp in self.P.compose(pf, i, pg).items():
                    key = ("hom", c, p)
                    out[key] = out.get(key, 0) + coeff * cp * s
        return {k: v for k, v in out.items() if v}

    def _act(self, f, perm):
        # (f^σ)(c) = f(c^{σ^{-1}})^σ
        _, cf, pf = f
        inv = perm_inverse(perm)
        out: Vector = {}
        for c in self.C.basis(len(perm)):
            coeff = self.C.act(c, inv).get(cf)
            if not coeff:
                continue
            for p, cp in self.P.act(pf, perm).items():
                out[("hom", c, p)] = out.get(("hom", c, p), 0) + coeff * cp
        return {k: v for k, v in out.items() if v}

    def d(self, f):
        _, cf, pf = f
        out: Vector = {}
        for p, c in self.P.d(pf).items():
            out[("hom", cf, p)] = out.get(("hom", cf, p), 0) + c
        return out


def convolution_operad(C: DualCooperad, P: Operad) -> ConvolutionOperad:
    return ConvolutionOperad(C, P)


def convolution_to_hadamard(X: Vector) -> Vector:
    """hom(Q^∨, P) → P ⊗_H Q, (c ↦ p) ↦ p ⊗ c."""
    return {(p, c): v for (_, c, p), v in X.items()}


# ---------------------------------------------------------------------------
# JSON presentations
# ---------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, tuple):
        return [_jsonable(o) for o in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def _tuplify(obj):
    if isinstance(obj, list):
        return tuple(_tuplify(o) for o in obj)
    return obj


def presentation_to_json(data: QuadraticData) -> dict:
    E = data.E
    gens = []
    for g, a, d in E.gens:
        action = {}
        if E.symmetric:
            for k in range(a - 1):
                perm = list(range(a))
                perm[k], perm[k + 1] = perm[k + 1], perm[k]
                action[f"s{k + 1}"] = [[_jsonable(g2), str(c)] for g2, c in E.act(g, tuple(perm)).items()]
        gens.append({"label": _jsonable(g), "arity": a, "degree": d, "action": action})
    rels = [[[_tree_json(t), str(c)] for t, c in sorted(r.items(), key=lambda kv: repr(kv[0]))]
            for r in data.relations]
    return {"name": data.name, "symmetric": E.symmetric, "generators": gens, "relations": rels}


def _tree_json(t):
    if is_leaf(t):
        return t + 1
    return [_jsonable(t[0])] + [_tree_json(c) for c in t[1]]


def _tree_from_json(obj, labels):
    if isinstance(obj, int):
        return obj - 1
    lab = _tuplify(obj[0])
    if lab not in labels:
        raise ValueError(f"unknown generator label {obj[0]!r}")
    return (lab, tuple(_tree_from_json(c, labels) for c in obj[1:]))


def presentation_from_json(obj: dict) -> QuadraticData:
    """Parse and validate a presentation; errors name the offending item."""
    symmetric = obj.get("symmetric", True)
    gens, actions = [], {}
    for idx, g in enumerate(obj["generators"]):
        lab = _tuplify(g["label"])
        gens.append((lab, int(g["arity"]), int(g.get("degree", 0))))
        actions[lab] = {k: {_tuplify(l2): Fraction(c) for l2, c in v} for k, v in g.get("action", {}).items()}
    labels = {g for g, _, _ in gens}

    def action(key, perm):
        # decompose perm into adjacent transpositions, apply right to left
        vec: Vector = {key: ONE}
        word = _adjacent_word(perm)
        for k in word:
            nxt: Vector = {}
            for lab, c in vec.items():
                img = actions[lab].get(f"s{k + 1}")
                if img is None:
                    raise ValueError(f"generator {lab!r} lacks action matrix s{k + 1}")
                vadd(nxt, img, c)
            vec = nxt
        return vec

    E = GeneratorModule(gens, action=action, symmetric=symmetric, name=obj.get("name", "E"))
    rels = []
    for ri, r in enumerate(obj.get("relations", [])):
        try:
            rels.append({_tree_from_json(t, labels): Fraction(c) for t, c in r})
        except (ValueError, TypeError, KeyError) as exc:
            raise ValueError(f"relation {ri}: {exc}") from exc
    try:
        return QuadraticData(E, rels, obj.get("name", "P"))
    except ValueError as exc:
        raise ValueError(f"relations invalid: {exc}") from exc


def _adjacent_word(perm) -> List[int]:
    """Indices k of adjacent transpositions s_k with perm = s_{k_1} s_{k_2} … ."""
    p = list(perm)
    word = []
    # bubble sort p to identity; each swap p ← p∘s_k
    changed = True
    while changed:
        changed = False
        for k in range(len(p) - 1):
            if p[k] > p[k + 1]:
                p[k], p[k + 1] = p[k + 1], p[k]
                word.append(k)
                changed = True
    # p∘s_{w1}∘…∘s_{wr} = id  ⇒  perm = s_{wr}…s_{w1}; right action applies s_{wr} first
    return list(reversed(word))
