"""
Exact kernel: rational scalars, sparse vectors, permutations and shuffles,
the Koszul sign oracle, graded based vector spaces and linear maps.

Everything downstream trusts the sign routines in this file, so they are
written as direct evaluations of the sign rule rather than closed forms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

Scalar = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)

Vector = Dict[Hashable, Fraction]


# ---------------------------------------------------------------------------
# sparse vectors: plain dicts key -> Fraction, zero entries dropped
# ---------------------------------------------------------------------------

def vadd(acc: Vector, vec: Vector, coeff=1) -> Vector:
    """acc += coeff * vec, in place; returns acc."""
    if not coeff:
        return acc
    for k, c in vec.items():
        v = acc.get(k, 0) + coeff * c
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)
    return acc


def vadd_term(acc: Vector, key, coeff) -> None:
    if not coeff:
        return
    v = acc.get(key, 0) + coeff
    if v:
        acc[key] = v
    else:
        del acc[key]


def vscale(vec: Vector, coeff) -> Vector:
    if not coeff:
        return {}
    return {k: coeff * c for k, c in vec.items()}


def vclean(vec: Vector) -> Vector:
    return {k: Fraction(c) for k, c in vec.items() if c}


def vsub(a: Vector, b: Vector) -> Vector:
    return vadd(dict(a), b, -1)


def vlinear(func: Callable[[Hashable], Vector], vec: Vector) -> Vector:
    """Extend a basis-level function linearly."""
    out: Vector = {}
    for k, c in vec.items():
        vadd(out, func(k), c)
    return out


def vbilinear(func, x: Vector, y: Vector) -> Vector:
    out: Vector = {}
    for kx, cx in x.items():
        for ky, cy in y.items():
            vadd(out, func(kx, ky), cx * cy)
    return out


# ---------------------------------------------------------------------------
# permutations (0-based image tuples internally)
# ---------------------------------------------------------------------------

class Permutation(tuple):
    """A permutation of {0..n-1}; p[i] is the image of i.

    `images` gives the 1-based image list used at the API boundary.
    """

    def __new__(cls, images0: Iterable[int]):
        t = tuple(images0)
        if sorted(t) != list(range(len(t))):
            raise ValueError(f"not a permutation: {t}")
        return super().__new__(cls, t)

    @classmethod
    def from_images(cls, images1: Sequence[int]) -> "Permutation":
        return cls(i - 1 for i in images1)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "Permutation":
        """Transposition of the 1-based letters i and j."""
        p = list(range(n))
        p[i - 1], p[j - 1] = p[j - 1], p[i - 1]
        return cls(p)

    @property
    def n(self) -> int:
        return len(self)

    @property
    def images(self) -> Tuple[int, ...]:
        return tuple(i + 1 for i in self)

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (self * other)(i) = self(other(i))
        return Permutation(self[j] for j in other)

    def inverse(self) -> "Permutation":
        return Permutation(perm_inverse(self))

    def sign(self) -> int:
        return perm_sign(self)

    def __repr__(self):
        return f"Permutation({list(self.images)})"


def perm_compose(a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
    return tuple(a[j] for j in b)


def perm_inverse(p: Sequence[int]) -> Tuple[int, ...]:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def perm_sign(p: Sequence[int]) -> int:
    seen = [False] * len(p)
    s = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def all_perms(n: int) -> List[Tuple[int, ...]]:
    return list(itertools.permutations(range(n)))


def koszul_sign(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign picked up when homogeneous x_i of the given degrees are moved so
    that x_i lands in position perm[i].

    Computed by bubble-sorting into place one adjacent swap at a time, each
    swap contributing (-1)^{|x||y|}; degrees travel with their elements.
    """
    if len(perm) != len(degrees):
        raise ValueError("koszul_sign: length mismatch between permutation and degrees")
    # target position of each element; sort elements by target via adjacent swaps
    order = list(perm)
    degs = list(degrees)
    sign = 1
    n = len(order)
    for i in range(n):
        for j in range(n - 1 - i):
            if order[j] > order[j + 1]:
                if degs[j] % 2 and degs[j + 1] % 2:
                    sign = -sign
                order[j], order[j + 1] = order[j + 1], order[j]
                degs[j], degs[j + 1] = degs[j + 1], degs[j]
    return sign


def reorder_sign(current: Sequence[Hashable], target: Sequence[Hashable],
                 degree_of: Dict[Hashable, int]) -> int:
    """Koszul sign of rearranging the factors listed in `current` into the
    order `target` (both lists of distinct tags)."""
    pos = {t: i for i, t in enumerate(target)}
    return koszul_sign([pos[c] for c in current], [degree_of[c] for c in current])


@dataclass(frozen=True)
class Shuffle:
    perm: Permutation
    blocks: Tuple[int, ...]

    @property
    def images(self):
        return self.perm.images

    def sign(self) -> int:
        return self.perm.sign()


def enumerate_shuffles(*sizes: int) -> List[Shuffle]:
    """All (n_1,...,n_k)-shuffles: permutations increasing on each block,
    in lexicographic order of their image sequences."""
    if any(s < 0 for s in sizes):
        raise ValueError("block sizes must be non-negative")
    n = sum(sizes)
    out = []
    for imgs in _shuffle_images(list(range(n)), list(sizes)):
        out.append(Shuffle(Permutation(imgs), tuple(sizes)))
    out.sort(key=lambda s: tuple(s.perm))
    return out


def _shuffle_images(avail: List[int], sizes: List[int]):
    if not sizes:
        yield ()
        return
    first, rest = sizes[0], sizes[1:]
    for chosen in itertools.combinations(avail, first):
        remaining = [a for a in avail if a not in chosen]
        for tail in _shuffle_images(remaining, rest):
            yield tuple(chosen) + tail


# ---------------------------------------------------------------------------
# graded based vector spaces and linear maps
# ---------------------------------------------------------------------------

class GradedSpace:
    """Finite-dimensional graded space with an ordered basis of
    (label, degree) pairs and an optional degree -1 differential stored as a
    sparse matrix {(target_index, source_index): coefficient}."""

    def __init__(self, name: str, basis: Sequence[Tuple[Hashable, int]],
                 d: Optional[Dict[Tuple[int, int], Fraction]] = None, check: bool = True):
        self.name = name
        self.basis: Tuple[Tuple[Hashable, int], ...] = tuple((lab, int(deg)) for lab, deg in basis)
        self._index = {lab: i for i, (lab, _) in enumerate(self.basis)}
        if len(self._index) != len(self.basis):
            raise ValueError("duplicate basis labels")
        self.d_entries = {k: Fraction(v) for k, v in (d or {}).items() if v}
        if check:
            for (t, s) in self.d_entries:
                if self.basis[t][1] != self.basis[s][1] - 1:
                    raise ValueError(f"{name}: differential entry {(t, s)} does not have degree -1")
            if self.d_entries and not self.d_map().compose(self.d_map()).is_zero():
                raise ValueError(f"{name}: differential does not square to zero")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def degree(self, i: int) -> int:
        return self.basis[i][1]

    def degrees(self) -> List[int]:
        return [d for _, d in self.basis]

    def label(self, i: int):
        return self.basis[i][0]

    def index(self, label) -> int:
        return self._index[label]

    def d_map(self) -> "LinearMap":
        return LinearMap(self, self, -1, self.d_entries, check=False)

    def d(self, vec: Vector) -> Vector:
        """Apply the differential to an index-keyed vector."""
        out: Vector = {}
        for (t, s), c in self.d_entries.items():
            if s in vec:
                vadd_term(out, t, c * vec[s])
        return out

    def has_differential(self) -> bool:
        return bool(self.d_entries)

    def __repr__(self):
        return f"GradedSpace({self.name!r}, dim={self.dim})"

    def __eq__(self, other):
        return (isinstance(other, GradedSpace) and self.basis == other.basis
                and self.d_entries == other.d_entries)

    def __hash__(self):
        return hash(self.basis)


class LinearMap:
    """Sparse matrix between graded spaces, entries[(target, source)]."""

    def __init__(self, source: GradedSpace, target: GradedSpace, degree: int,
                 entries: Dict[Tuple[int, int], Fraction], check: bool = True):
        self.source = source
        self.target = target
        self.degree = degree
        self.entries = {k: Fraction(v) for k, v in entries.items() if v}
        if check:
            for (t, s) in self.entries:
                if target.degree(t) - source.degree(s) != degree:
                    raise ValueError(f"entry {(t, s)} incompatible with degree {degree}")

    @classmethod
    def identity(cls, V: GradedSpace) -> "LinearMap":
        return cls(V, V, 0, {(i, i): ONE for i in range(V.dim)})

    @classmethod
    def zero(cls, V: GradedSpace, W: GradedSpace, degree: int = 0) -> "LinearMap":
        return cls(V, W, degree, {})

    def apply(self, vec: Vector) -> Vector:
        out: Vector = {}
        for (t, s), c in self.entries.items():
            if s in vec:
                vadd_term(out, t, c * vec[s])
        return out

    def column(self, s: int) -> Vector:
        return {t: c for (t, ss), c in self.entries.items() if ss == s}

    def compose(self, other: "LinearMap") -> "LinearMap":
        """self ∘ other."""
        cols: Dict[int, Dict[int, Fraction]] = {}
        for (t, s), c in other.entries.items():
            cols.setdefault(s, {})[t] = c
        rows: Dict[int, Dict[int, Fraction]] = {}
        for (t, s), c in self.entries.items():
            rows.setdefault(s, {})[t] = c
        out: Dict[Tuple[int, int], Fraction] = {}
        for s, col in cols.items():
            for mid, c1 in col.items():
                for t, c2 in rows.get(mid, {}).items():
                    k = (t, s)
                    out[k] = out.get(k, 0) + c2 * c1
        return LinearMap(other.source, self.target, self.degree + other.degree, out, check=False)

    def __add__(self, other: "LinearMap") -> "LinearMap":
        out = dict(self.entries)
        for k, c in other.entries.items():
            out[k] = out.get(k, 0) + c
        return LinearMap(self.source, self.target, self.degree, out, check=False)

    def scale(self, c) -> "LinearMap":
        return LinearMap(self.source, self.target, self.degree,
                         {k: c * v for k, v in self.entries.items()}, check=False)

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, LinearMap) and self.degree == other.degree
                and self.entries == other.entries)

    def __repr__(self):
        return f"LinearMap({self.source.name}->{self.target.name}, deg={self.degree}, nnz={len(self.entries)})"


def hom_differential(phi: LinearMap) -> LinearMap:
    """∂φ = d_W φ − (−1)^{|φ|} φ d_V."""
    sign = -1 if phi.degree % 2 == 0 else 1
    return phi.target.d_map().compose(phi) + phi.compose(phi.source.d_map()).scale(sign)


def tensor_space(V: GradedSpace, W: GradedSpace) -> GradedSpace:
    """V⊗W with basis pairs in lexicographic order and the Koszul-signed
    differential d⊗1 + 1⊗d."""
    basis = [((a, b), da + db) for (a, da) in V.basis for (b, db) in W.basis]
    idx = lambda i, j: i * W.dim + j
    d: Dict[Tuple[int, int], Fraction] = {}
    for (t, s), c in V.d_entries.items():
        for j in range(W.dim):
            d[(idx(t, j), idx(s, j))] = c
    for (t, s), c in W.d_entries.items():
        for i in range(V.dim):
            sign = -1 if V.degree(i) % 2 else 1
            k = (idx(i, t), idx(i, s))
            d[k] = d.get(k, 0) + sign * c
    return GradedSpace(f"{V.name}⊗{W.name}", basis, d, check=False)


def tensor_map(f: LinearMap, g: LinearMap) -> LinearMap:
    """(f⊗g)(x⊗y) = (−1)^{|g||x|} f(x)⊗g(y)."""
    S = tensor_space(f.source, g.source)
    T = tensor_space(f.target, g.target)
    out: Dict[Tuple[int, int], Fraction] = {}
    gW = g.target.dim
    gV = g.source.dim
    for (t1, s1), c1 in f.entries.items():
        sign = -1 if (g.degree * f.source.degree(s1)) % 2 else 1
        for (t2, s2), c2 in g.entries.items():
            out[(t1 * gW + t2, s1 * gV + s2)] = sign * c1 * c2
    return LinearMap(S, T, f.degree + g.degree, out, check=False)


# ---------------------------------------------------------------------------
# suspensions: one routine owns every s / s^{-1} sign
# ---------------------------------------------------------------------------

def suspend(V: GradedSpace, k: int = 1) -> GradedSpace:
    """s^k V: degrees shifted by k, labels tagged with the shift, and the
    differential twisted by (−1)^k."""
    tag = f"s^{k}"
    basis = [((tag, lab), deg + k) for lab, deg in V.basis]
    sign = -1 if k % 2 else 1
    d = {key: sign * c for key, c in V.d_entries.items()}
    return GradedSpace(f"{tag}{V.name}", basis, d, check=False)


def shift_word_sign(word: Sequence[int]) -> int:
    """Reduce a composite of shift symbols (+1 for s, −1 for s^{-1}), written
    left to right as maps applied right to left, to ±identity using
    s^{-1}s = 1 and s s^{-1} = −1.  The word must have total shift 0."""
    if sum(word) != 0:
        raise ValueError("shift word does not reduce to the identity")
    w = list(word)
    sign = 1
    changed = True
    while changed and w:
        changed = False
        for i in range(len(w) - 1):
            if w[i] == -w[i + 1]:
                if w[i] == 1:  # s s^{-1}
                    sign = -sign
                del w[i:i + 2]
                changed = True
                break
    return sign


def shift_space(deg: int) -> GradedSpace:
    return GradedSpace(f"k[{deg}]", [("1", deg)])


def shift_map(k: int) -> LinearMap:
    """The degree-k map k → s^k k (k = ±1)."""
    return LinearMap(shift_space(0), shift_space(k), k, {(0, 0): ONE})


def tensor_power_map(f: LinearMap, n: int) -> LinearMap:
    out = f
    for _ in range(n - 1):
        out = tensor_map(out, f)
    return out


def desuspension_power_sign(n: int) -> int:
    """The scalar by which (s^{-1})^{⊗n} ∘ s^{⊗n} acts on k^{⊗n}, computed by
    evaluating the Koszul rule on one-dimensional spaces."""
    if n == 0:
        return 1
    s = shift_map(1)
    sinv = LinearMap(shift_space(1), shift_space(0), -1, {(0, 0): ONE})
    comp = tensor_power_map(sinv, n).compose(tensor_power_map(s, n))
    val = comp.entries.get((0, 0), ZERO)
    return int(val)


def desuspension_tensor_sign(degrees: Sequence[int]) -> int:
    """Sign of (s^{-1})^{⊗n}(s x_1 ⊗ … ⊗ s x_n) = ± x_1 ⊗ … ⊗ x_n for
    homogeneous x_i of the given (unsuspended) degrees.  Each s^{-1} in slot
    j passes the suspended factors s x_i, i < j."""
    sign = 1
    n = len(degrees)
    for j in range(n):
        for i in range(j):
            if (degrees[i] + 1) % 2:  # |s^{-1}| odd, |s x_i| = |x_i| + 1
                sign = -sign
    return sign


# ---------------------------------------------------------------------------
# invariants and coinvariants of a finite group action
# ---------------------------------------------------------------------------

def orbit_sum(vec: Vector, group: Sequence, act: Callable[[object, Vector], Vector]) -> Vector:
    out: Vector = {}
    for g in group:
        vadd(out, act(g, vec))
    return out


def coinvariant_class(vec: Vector, group: Sequence, act) -> Vector:
    """Canonical representative of the class of vec in V_G: its average."""
    return vscale(orbit_sum(vec, group, act), Fraction(1, len(group)))


def invariants_to_coinvariants(vec: Vector, group: Sequence, act) -> Vector:
    """V^G → V_G, v ↦ (1/|G|)[v]; returns the canonical class representative."""
    return coinvariant_class(vscale(vec, Fraction(1, len(group))), group, act)


def coinvariants_to_invariants(cls: Vector, group: Sequence, act) -> Vector:
    """V_G → V^G, [v] ↦ Σ_g g·v."""
    return orbit_sum(cls, group, act)


def is_invariant(vec: Vector, group: Sequence, act) -> bool:
    return all(act(g, vec) == vec for g in group)


# ---------------------------------------------------------------------------
# sparse row reduction
# ---------------------------------------------------------------------------

class RowReducer:
    """Incremental echelon form over Q.  Each stored row has its pivot at its
    largest column with respect to `order` (a key function), so reducing a
    vector only ever introduces smaller columns."""

    def __init__(self, order: Callable[[Hashable], object] = lambda k: k):
        self.order = order
        self.rows: Dict[Hashable, Vector] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _pivot(self, vec: Vector):
        return max(vec, key=self.order)

    def reduce(self, vec: Vector) -> Vector:
        v = dict(vec)
        while True:
            cands = [k for k in v if k in self.rows]
            if not cands:
                return v
            k = max(cands, key=self.order)
            row = self.rows[k]
            vadd(v, row, -v[k])

    def add(self, vec: Vector) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        p = self._pivot(v)
        c = v[p]
        self.rows[p] = {k: x / c for k, x in v.items()}
        return True

    def contains(self, vec: Vector) -> bool:
        return not self.reduce(vec)

    def pivots(self):
        return set(self.rows)


def rank_of(vectors: Iterable[Vector], order=lambda k: k) -> int:
    rr = RowReducer(order)
    for v in vectors:
        rr.add(v)
    return rr.rank


def solve_in_span(spanning: Sequence[Vector], target: Vector) -> Optional[List[Fraction]]:
    """Coefficients c with Σ c_i spanning[i] = target, or None."""
    tagged = []
    for i, v in enumerate(spanning):
        w = dict(v)
        w[("__tag__", i)] = ONE
        tagged.append(w)
    # order real columns above tag columns so pivots land on real columns
    order = lambda k: (0, k[1]) if isinstance(k, tuple) and len(k) == 2 and k[0] == "__tag__" else (1, repr(k))
    rr = RowReducer(order)
    for w in tagged:
        rr.add(w)
    t = rr.reduce(dict(target))
    if any(not (isinstance(k, tuple) and len(k) == 2 and k[0] == "__tag__") for k in t):
        return None
    coeffs = [ZERO] * len(spanning)
    for k, c in t.items():
        coeffs[k[1]] = -c
    # verify rather than trust the bookkeeping
    acc: Vector = {}
    for i, c in enumerate(coeffs):
        vadd(acc, spanning[i], c)
    if vclean(acc) != vclean(target):
        return None
    return coeffs


def group_order(n: int) -> int:
    return factorial(n)


def kernel_relations(vectors: Sequence[Vector]) -> List[Dict[int, Fraction]]:
    """Basis of the linear relations {c : Σ c_i vectors[i] = 0}, each given
    as a sparse map index ↦ coefficient."""
    is_tag = lambda k: isinstance(k, tuple) and len(k) == 2 and k[0] == "__tag__"
    order = lambda k: (0, k[1]) if is_tag(k) else (1, repr(k))
    rr = RowReducer(order)
    out: List[Dict[int, Fraction]] = []
    for i, v in enumerate(vectors):
        w = dict(v)
        w[("__tag__", i)] = ONE
        r = rr.reduce(w)
        if all(is_tag(k) for k in r):
            out.append({k[1]: c for k, c in r.items()})
        else:
            rr.add(r)
    return out
