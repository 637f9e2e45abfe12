"""
Homotopy algebras in the shifted picture: structure maps of degree −1 on sV,
assembled into a coderivation of the cofree coalgebra Sym^c(sV) (symmetric
case) or T^c(sV) (non-symmetric case).  Every sign here is a Koszul sign.

Words are tuples of basis indices of V.  In the symmetric case a word is
kept sorted, and `normal_word` returns the sign of sorting (or 0 when an
odd element repeats).  Multilinear maps are dicts {word: {index: coeff}},
defined on normal words.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from math import factorial
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .exact_core import ONE, Vector, vadd

Word = Tuple[int, ...]
MultiMap = Dict[Word, Vector]


def _sort_sign(word: Sequence[int], degs: Sequence[int]) -> Tuple[int, Word]:
    w = list(word)
    sign = 1
    for a in range(1, len(w)):
        b = a
        while b > 0 and w[b - 1] > w[b]:
            if degs[w[b - 1]] % 2 and degs[w[b]] % 2:
                sign = -sign
            w[b - 1], w[b] = w[b], w[b - 1]
            b -= 1
    for a in range(1, len(w)):
        if w[a] == w[a - 1] and degs[w[a]] % 2:
            return 0, ()
    return sign, tuple(w)


def set_partitions(items: Sequence[int]):
    """Set partitions of a list of positions, blocks ordered by first element."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]


def compositions(n: int):
    """Ordered splittings of range(n) into consecutive non-empty blocks."""
    if n == 0:
        yield []
        return
    for first in range(1, n + 1):
        for rest in compositions(n - first):
            yield [list(range(first))] + [[x + first for x in b] for b in rest]


class ShiftedCoalgebra:
    """Sym^c(sV) or T^c(sV) for a graded space with degrees `degs` of V."""

    def __init__(self, degs: Sequence[int], symmetric: bool = True):
        self.vdegs = list(degs)
        self.degs = [d + 1 for d in degs]
        self.symmetric = symmetric
        self.dim = len(degs)

    def normal_word(self, word: Sequence[int]) -> Tuple[int, Word]:
        if not self.symmetric:
            return 1, tuple(word)
        return _sort_sign(word, self.degs)

    def words(self, n: int) -> List[Word]:
        if self.symmetric:
            out = []
            for w in combinations_with_replacement(range(self.dim), n):
                if self.normal_word(w)[0]:
                    out.append(w)
            return out
        return list(product(range(self.dim), repeat=n))

    def word_degree(self, w: Sequence[int]) -> int:
        return sum(self.degs[a] for a in w)

    def reorder_sign(self, w: Sequence[int], order: Sequence[int]) -> int:
        """Koszul sign of permuting the factors of w into the order `order`
        (a list of positions)."""
        sign = 1
        pos = list(order)
        for a in range(len(pos)):
            for b in range(a + 1, len(pos)):
                if pos[a] > pos[b] and self.degs[w[pos[a]]] % 2 and self.degs[w[pos[b]]] % 2:
                    sign = -sign
        return sign

    def mul(self, X: Dict[Word, Fraction], Y: Dict[Word, Fraction]) -> Dict[Word, Fraction]:
        out: Dict[Word, Fraction] = {}
        for u, a in X.items():
            for v, b in Y.items():
                s, w = self.normal_word(u + v)
                if s:
                    out[w] = out.get(w, 0) + s * a * b
        return {k: v for k, v in out.items() if v}

    def as_words(self, vec: Vector) -> Dict[Word, Fraction]:
        return {(k,): c for k, c in vec.items() if c}

    # ------------------------------------------------------------------
    def splittings(self, w: Word):
        """Ordered families of blocks of positions: set partitions in the
        symmetric case, consecutive compositions otherwise."""
        if self.symmetric:
            return set_partitions(range(len(w)))
        return compositions(len(w))

    def coderivation(self, L: Dict[int, Callable[[Word], Vector]], X: Dict[Word, Fraction],
                     max_arity: Optional[int] = None) -> Dict[Word, Fraction]:
        """Apply the coderivation with components L[k] (degree −1)."""
        out: Dict[Word, Fraction] = {}
        for w, c in X.items():
            n = len(w)
            if self.symmetric:
                for k in range(1, n + 1):
                    if k not in L or (max_arity and k > max_arity):
                        continue
                    for I in combinations(range(n), k):
                        J = [j for j in range(n) if j not in I]
                        sgn = self.reorder_sign(w, list(I) + J)
                        val = L[k](tuple(w[i] for i in I))
                        if not val:
                            continue
                        rest = {tuple(w[j] for j in J): ONE}
                        for ww, cc in self.mul(self.as_words(val), rest).items():
                            out[ww] = out.get(ww, 0) + c * sgn * cc
            else:
                for i in range(n):
                    pre = sum(self.degs[a] for a in w[:i])
                    sgn = -1 if pre % 2 else 1
                    for k in range(1, n - i + 1):
                        if k not in L or (max_arity and k > max_arity):
                            continue
                        val = L[k](w[i:i + k])
                        for x, cx in val.items():
                            ww = w[:i] + (x,) + w[i + k:]
                            out[ww] = out.get(ww, 0) + c * sgn * cx
        return {k: v for k, v in out.items() if v}

    def coalgebra_map(self, target: "ShiftedCoalgebra", F: Dict[int, Callable[[Word], Vector]],
                      X: Dict[Word, Fraction]) -> Dict[Word, Fraction]:
        """The coalgebra morphism with degree-0 components F[k]."""
        out: Dict[Word, Fraction] = {}
        for w, c in X.items():
            for blocks in self.splittings(w):
                if any(len(b) not in F for b in blocks):
                    continue
                order = [p for b in blocks for p in b]
                sgn = self.reorder_sign(w, order) if self.symmetric else 1
                acc: Dict[Word, Fraction] = {(): Fraction(sgn) * c}
                for b in blocks:
                    val = F[len(b)](tuple(w[p] for p in b))
                    if not val:
                        acc = {}
                        break
                    acc = target.mul(acc, target.as_words(val)) if target.symmetric else \
                        {u + (x,): a * cx for u, a in acc.items() for x, cx in val.items()}
                for ww, cc in acc.items():
                    out[ww] = out.get(ww, 0) + cc
        return {k: v for k, v in out.items() if v}


def lookup(table: MultiMap, co: ShiftedCoalgebra) -> Callable[[Word], Vector]:
    """Turn a table defined on normal words into a function on any word."""
    def f(w: Word) -> Vector:
        s, nw = co.normal_word(w)
        if not s:
            return {}
        val = table.get(nw)
        if not val:
            return {}
        return {k: s * v for k, v in val.items()} if s != 1 else val
    return f


class ShiftedStructure:
    """Components L_n: (sV)^{⊗n} → sV of degree −1, n ≥ 1."""

    def __init__(self, co: ShiftedCoalgebra, tables: Dict[int, MultiMap]):
        self.co = co
        self.tables = {n: {w: dict(v) for w, v in t.items() if v} for n, t in tables.items()}

    def funcs(self) -> Dict[int, Callable[[Word], Vector]]:
        return {n: lookup(t, self.co) for n, t in self.tables.items()}

    def D(self, X):
        return self.co.coderivation(self.funcs(), X)

    def square_defect(self, max_weight: int) -> Dict[Word, Fraction]:
        """Non-zero entries of D² on words of weight ≤ max_weight."""
        F = self.funcs()
        bad: Dict[Word, Fraction] = {}
        for n in range(1, max_weight + 1):
            for w in self.co.words(n):
                r = self.co.coderivation(F, self.co.coderivation(F, {w: ONE}))
                if r:
                    bad[w] = r
        return bad


class ShiftedMorphism:
    """Components F_n: (sV)^{⊗n} → sW of degree 0."""

    def __init__(self, source: ShiftedStructure, target: ShiftedStructure, tables: Dict[int, MultiMap]):
        self.source, self.target = source, target
        self.tables = {n: {w: dict(v) for w, v in t.items() if v} for n, t in tables.items()}

    def funcs(self):
        return {n: lookup(t, self.source.co) for n, t in self.tables.items()}

    def commutation_defect(self, max_weight: int) -> Dict[Word, Dict]:
        """Words w with D_W F̃(w) ≠ F̃ D_V(w)."""
        co, F = self.source.co, self.funcs()
        bad = {}
        for n in range(1, max_weight + 1):
            for w in co.words(n):
                lhs = self.target.D(co.coalgebra_map(self.target.co, F, {w: ONE}))
                rhs = co.coalgebra_map(self.target.co, F, self.source.D({w: ONE}))
                diff = dict(lhs)
                for k, v in rhs.items():
                    diff[k] = diff.get(k, 0) - v
                diff = {k: v for k, v in diff.items() if v}
                if diff:
                    bad[w] = diff
        return bad

    def then(self, other: "ShiftedMorphism", max_weight: int) -> "ShiftedMorphism":
        """other ∘ self, component-wise pr ∘ G̃ ∘ F̃."""
        co = self.source.co
        F, G = self.funcs(), other.funcs()
        tables: Dict[int, MultiMap] = {}
        for n in range(1, max_weight + 1):
            t: MultiMap = {}
            for w in co.words(n):
                mid = co.coalgebra_map(self.target.co, F, {w: ONE})
                val: Vector = {}
                for u, c in mid.items():
                    if len(u) in G:
                        vadd(val, G[len(u)](u), c)
                val = {k: v for k, v in val.items() if v}
                if val:
                    t[w] = val
            tables[n] = t
        return ShiftedMorphism(self.source, other.target, tables)

    def equals(self, other: "ShiftedMorphism", max_weight: int) -> bool:
        for n in range(1, max_weight + 1):
            a, b = self.tables.get(n, {}), other.tables.get(n, {})
            if {w: v for w, v in a.items() if v} != {w: v for w, v in b.items() if v}:
                return False
        return True


def identity_morphism(S: ShiftedStructure) -> ShiftedMorphism:
    return ShiftedMorphism(S, S, {1: {(a,): {a: ONE} for a in range(S.co.dim)}})
