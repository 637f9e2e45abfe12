"""
Rooted decorated trees, free operads and monadic composition.

A tree is either a leaf (an int, the 0-based input it reads) or a vertex
``(label, children)`` with ``children`` a tuple of trees.  Symmetric trees
are kept canonical by ordering children by their smallest leaf; planar
(non-symmetric) trees keep their children as given and have leaves in
increasing order.  An element of a tree module is a sparse vector
``{tree: Fraction}``; the tensor factor order of the vertex labels is the
canonical vertex order: by depth, then by smallest leaf.

Signs are handled uniformly: an intermediate tree carries labels tagged
``(tag, key)`` where sorting the tags gives the tensor order of the labels
as they were produced.  `canonical_vector` then sorts children (acting on
labels) and applies the Koszul sign to reach canonical vertex order.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from .exact_core import ONE, Vector, perm_inverse, reorder_sign, vadd, vscale, koszul_sign
from .operad_base import Operad, SModule

Tree = object  # int | (label, tuple_of_trees)


# ---------------------------------------------------------------------------
# basic structure
# ---------------------------------------------------------------------------

def is_leaf(t) -> bool:
    return isinstance(t, int)


def leaves(t) -> List[int]:
    """Leaves in planar (left to right) order."""
    if is_leaf(t):
        return [t]
    out: List[int] = []
    for c in t[1]:
        out.extend(leaves(c))
    return out


def min_leaf(t) -> int:
    if is_leaf(t):
        return t
    return min(min_leaf(c) for c in t[1])


def arity_of(t) -> int:
    return len(leaves(t))


def corolla(label, k: int):
    return (label, tuple(range(k)))


def vertex_paths(t) -> List[Tuple[int, ...]]:
    """Vertex addresses (child-index paths) in canonical order."""
    found: List[Tuple[int, int, Tuple[int, ...]]] = []

    def walk(node, path):
        if is_leaf(node):
            return
        found.append((len(path), min_leaf(node), path))
        for j, c in enumerate(node[1]):
            walk(c, path + (j,))

    walk(t, ())
    found.sort()
    return [p for _, _, p in found]


def vertex_labels(t) -> List[Hashable]:
    return [subtree(t, p)[0] for p in vertex_paths(t)]


def weight(t) -> int:
    if is_leaf(t):
        return 0
    return 1 + sum(weight(c) for c in t[1])


def subtree(t, path):
    for j in path:
        t = t[1][j]
    return t


def replace_at(t, path, new):
    if not path:
        return new
    label, ch = t
    j = path[0]
    return (label, ch[:j] + (replace_at(ch[j], path[1:], new),) + ch[j + 1:])


def relabel_leaves(t, f: Callable[[int], int]):
    if is_leaf(t):
        return f(t)
    return (t[0], tuple(relabel_leaves(c, f) for c in t[1]))


def map_labels(t, f):
    if is_leaf(t):
        return t
    return (f(t[0]), tuple(map_labels(c, f) for c in t[1]))


def tree_degree(t, degree_of) -> int:
    return sum(degree_of(l) for l in vertex_labels(t))


def preorder_labels(t) -> List[Hashable]:
    if is_leaf(t):
        return []
    out = [t[0]]
    for c in t[1]:
        out.extend(preorder_labels(c))
    return out


# ---------------------------------------------------------------------------
# canonical form with Koszul bookkeeping
# ---------------------------------------------------------------------------

def _canon_tagged(node, M: SModule, symmetric: bool) -> Vector:
    if is_leaf(node):
        return {node: ONE}
    (tag, key), children = node
    options = [list(_canon_tagged(c, M, symmetric).items()) for c in children]
    out: Vector = {}
    for combo in product(*options):
        coeff = ONE
        kids = []
        for c, v in combo:
            kids.append(c)
            coeff *= v
        if symmetric:
            tau = tuple(sorted(range(len(kids)), key=lambda p: min_leaf(kids[p])))
            kids = [kids[tau[p]] for p in range(len(kids))]
            labels = M.act(key, tau)
        else:
            labels = {key: ONE}
        for k2, c2 in labels.items():
            vadd(out, {((tag, k2), tuple(kids)): ONE}, coeff * c2)
    return out


def canonical_vector(tagged, M: SModule, symmetric: bool, coeff=ONE) -> Vector:
    """Canonicalize a tagged tree, returning an untagged tree vector.

    The tags, sorted, give the current tensor order of the labels."""
    out: Vector = {}
    for t, c in _canon_tagged(tagged, M, symmetric).items():
        tags = [lab for lab in vertex_labels(t)]
        current = sorted(tags, key=lambda lab: lab[0])
        deg = {lab: M.degree(lab[1]) for lab in tags}
        sign = reorder_sign(current, tags, deg)
        vadd(out, {map_labels(t, lambda lab: lab[1]): ONE}, c * coeff * sign)
    return out


def tag_canonical(t, prefix=()):
    """Tag labels of an (already canonical) tree by their canonical index."""
    paths = vertex_paths(t)
    for idx, p in enumerate(paths):
        node = subtree(t, p)
        t = replace_at(t, p, ((prefix + (idx,), node[0]), node[1]))
    return t


# ---------------------------------------------------------------------------
# grafting, action, substitution
# ---------------------------------------------------------------------------

def graft(x, i: int, y, M: SModule, symmetric: bool) -> Vector:
    """x ∘_i y on canonical trees (1-based slot i)."""
    n2 = arity_of(y)
    ty = relabel_leaves(tag_canonical(y, (1,)), lambda a: a + i - 1)
    tx = tag_canonical(x, (0,))

    def put(node):
        if is_leaf(node):
            if node < i - 1:
                return node
            if node == i - 1:
                return ty
            return node + n2 - 1
        return (node[0], tuple(put(c) for c in node[1]))

    return canonical_vector(put(tx), M, symmetric)


def act_tree(t, perm, M: SModule) -> Vector:
    """Right action t^π: the leaf reading input ℓ now reads π^{-1}(ℓ)."""
    inv = perm_inverse(perm)
    return canonical_vector(relabel_leaves(tag_canonical(t), lambda a: inv[a]), M, True)


def substitute(t, path, replacement: Vector, M: SModule, symmetric: bool) -> Vector:
    """Replace the vertex at `path` by a tree vector of the same arity whose
    leaf j is plugged into the vertex's j-th child.  The replacement's labels
    take the tensor position of the removed label."""
    paths = vertex_paths(t)
    pos = paths.index(path)
    tagged = t
    for idx, p in enumerate(paths):
        if idx == pos:
            continue
        node = subtree(tagged, p)
        tag = (0, idx) if idx < pos else (2, idx)
        tagged = replace_at(tagged, p, ((tag, node[0]), node[1]))
    children = subtree(tagged, path)[1]
    out: Vector = {}
    for s, c in replacement.items():
        ts = tag_canonical(s, (1,))

        def plug(node):
            if is_leaf(node):
                return children[node]
            return (node[0], tuple(plug(ch) for ch in node[1]))

        # children of the removed vertex still carry their own tags
        whole = replace_at(tagged, path, plug(ts))
        vadd(out, canonical_vector(whole, M, symmetric), c)
    return out


def tree_derivation(t, gen_d: Callable[[Hashable], Vector], M: SModule, symmetric: bool) -> Vector:
    """Extend a map on generators (label ↦ tree vector) to a derivation."""
    out: Vector = {}
    sign_deg = 0
    for p in vertex_paths(t):
        lab = subtree(t, p)[0]
        image = gen_d(lab)
        if image:
            vadd(out, substitute(t, p, image, M, symmetric), -1 if sign_deg % 2 else 1)
        sign_deg += M.degree(lab)
    return out


# ---------------------------------------------------------------------------
# monadic composition
# ---------------------------------------------------------------------------

def eval_tree(t, P: Operad, label_map: Optional[Callable[[Hashable], Vector]] = None,
              degree_of: Optional[Callable[[Hashable], int]] = None) -> Vector:
    """Compose a decorated tree inside P.

    `label_map` sends a vertex label to an element of P (default: the label
    is already a basis key of P).  `degree_of` gives the parity used to move
    labels from canonical order into the depth-first order in which they
    are composed; it must be the degree of the image."""
    if is_leaf(t):
        return P.unit()
    if label_map is None:
        label_map = lambda lab: {lab: ONE}
    if degree_of is None:
        degree_of = P.degree
    canon = vertex_paths(t)
    pre = []

    def walk(node, path):
        if is_leaf(node):
            return
        pre.append(path)
        for j, c in enumerate(node[1]):
            walk(c, path + (j,))

    walk(t, ())
    deg = {p: degree_of(subtree(t, p)[0]) for p in canon}
    sign = reorder_sign(canon, pre, deg)

    def value(node) -> Vector:
        if is_leaf(node):
            return P.unit()
        acc = label_map(node[0])
        pos = 1
        for c in node[1]:
            acc = P.compose_vec(acc, pos, value(c))
            pos += arity_of(c)
        return acc

    res = value(t)
    order = leaves(t)
    if order != sorted(order):
        res = P.act_vec(res, perm_inverse(order))
    return vscale(res, sign) if sign != 1 else res


def eval_vector(X: Vector, P: Operad, label_map=None, degree_of=None) -> Vector:
    out: Vector = {}
    for t, c in X.items():
        vadd(out, eval_tree(t, P, label_map, degree_of), c)
    return out


def eval_all_orders(t, P: Operad) -> List[Vector]:
    """Evaluate a tree by contracting internal edges in every possible
    order; each result must agree with `eval_tree` (associativity check)."""
    results: List[Vector] = []

    def finish(vec: Vector) -> Vector:
        out: Vector = {}
        for s, c in vec.items():
            if is_leaf(s):
                vadd(out, P.unit(), c)
            else:
                lab, ch = s
                vadd(out, P.act(lab, perm_inverse(list(ch))), c)
        return out

    def run(vec: Vector):
        vec = {k: v for k, v in vec.items() if v}
        if not vec:
            results.append({})
            return
        # all terms share one shape, so edges are read off any of them
        tree0 = next(iter(vec))
        if weight(tree0) <= 1:
            results.append(finish(vec))
            return
        for p in vertex_paths(tree0):
            for j, c in enumerate(subtree(tree0, p)[1]):
                if is_leaf(c):
                    continue
                new: Vector = {}
                for s, coeff in vec.items():
                    vadd(new, contract_edge(s, p, j, P), coeff)
                run(new)

    run({t: ONE})
    return results


class _OperadAsModule(SModule):
    def __init__(self, P: Operad):
        self.P = P
        self.symmetric = P.symmetric

    def degree(self, key):
        return self.P.degree(key)

    def arity(self, key):
        return self.P.arity(key)

    def act(self, key, perm):
        return self.P.act(key, perm)


def contract_edge(t, path, j: int, P: Operad) -> Vector:
    """Compose the vertex at `path` with its j-th child (a vertex), inside P,
    leaving the rest of the tree untouched.  Labels must be P basis keys."""
    M = _OperadAsModule(P)
    node = subtree(t, path)
    child = node[1][j]
    paths = vertex_paths(t)
    v_idx = paths.index(path)
    w_idx = paths.index(path + (j,))
    lab_v, lab_w = node[0], child[0]
    deg = {idx: P.degree(subtree(t, p)[0]) for idx, p in enumerate(paths)}
    # move w directly after v in the tensor order
    current = list(range(len(paths)))
    target = [k for k in current if k != w_idx]
    target.insert(target.index(v_idx) + 1, w_idx)
    sign = reorder_sign(current, target, deg)
    # slot of child j inside v, in v's own input numbering
    slot = j + 1
    comp = P.compose(lab_v, slot, lab_w)
    kids = node[1][:j] + child[1] + node[1][j + 1:]
    out: Vector = {}
    tagged = t
    for idx, p in enumerate(paths):
        if idx in (v_idx, w_idx):
            continue
        sub = subtree(tagged, p)
        rank = target.index(idx)
        tagged = replace_at(tagged, p, (((rank,), sub[0]), sub[1]))
    rank_v = target.index(v_idx)
    for lab, c in comp.items():
        # rebuild node with merged vertex; children keep their tags
        tagged_node = subtree(tagged, path)
        merged_kids = tagged_node[1][:j] + subtree(tagged, path + (j,))[1] + tagged_node[1][j + 1:]
        whole = replace_at(tagged, path, (((rank_v,), lab), merged_kids))
        vadd(out, canonical_vector(whole, M, P.symmetric), c * sign)
    return out


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def _set_partitions_by_min(items: Tuple[int, ...]):
    """Set partitions of a sorted tuple, blocks ordered by their minimum."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    m = len(rest)
    for mask in range(1 << m):
        block = (first,) + tuple(rest[k] for k in range(m) if mask >> k & 1)
        remaining = tuple(rest[k] for k in range(m) if not mask >> k & 1)
        for tail in _set_partitions_by_min(remaining):
            yield [block] + tail


def _compositions(items: Tuple[int, ...]):
    n = len(items)
    for mask in range(1 << max(n - 1, 0)):
        blocks, cur = [], [items[0]]
        for k in range(1, n):
            if mask >> (k - 1) & 1:
                blocks.append(tuple(cur))
                cur = []
            cur.append(items[k])
        blocks.append(tuple(cur))
        yield blocks


def enumerate_trees(M: SModule, n: int, weight_cap: int, symmetric: Optional[bool] = None,
                    min_weight: int = 0) -> List[Tree]:
    """Canonical decorated trees of arity n with at most `weight_cap`
    vertices, labels running over the basis of M."""
    if symmetric is None:
        symmetric = M.symmetric
    label_arities = {k: M.basis(k) for k in range(1, n + 1)}
    label_arities = {k: v for k, v in label_arities.items() if v}

    @lru_cache(maxsize=None)
    def build(leafset: Tuple[int, ...], wcap: int) -> Tuple[Tuple[object, int], ...]:
        out: List[Tuple[object, int]] = []
        if len(leafset) == 1:
            out.append((leafset[0], 0))
        if wcap <= 0:
            return tuple(out)
        splits = _set_partitions_by_min(leafset) if symmetric else _compositions(leafset)
        for blocks in splits:
            k = len(blocks)
            if k not in label_arities:
                continue
            if k == 1:
                # unary vertex above a subtree on the same leaves
                pass
            opts = [build(b, wcap - 1) for b in blocks]
            if any(not o for o in opts):
                continue
            for combo in product(*opts):
                w = 1 + sum(c[1] for c in combo)
                if w > wcap:
                    continue
                kids = tuple(c[0] for c in combo)
                for lab in label_arities[k]:
                    out.append(((lab, kids), w))
        return tuple(out)

    res = [t for t, w in build(tuple(range(n)), weight_cap) if w >= min_weight]
    if n == 1 and min_weight == 0 and 0 not in res:
        res.insert(0, 0)
    return res


# ---------------------------------------------------------------------------
# free operad
# ---------------------------------------------------------------------------

class FreeOperad(Operad):
    """The free (optionally quasi-free) operad T(M), truncated for basis
    enumeration at `arity_cap` and `weight_cap` vertices."""

    def __init__(self, M: SModule, arity_cap: int, weight_cap: int,
                 gen_d: Optional[Callable[[Hashable], Vector]] = None, name: str = "T"):
        super().__init__()
        self.M = M
        self.symmetric = M.symmetric
        self.arity_cap = arity_cap
        self.weight_cap = weight_cap
        self.gen_d = gen_d
        self.name = name
        self._basis: Dict[int, List] = {}

    def basis(self, n: int):
        if n not in self._basis:
            self._basis[n] = enumerate_trees(self.M, n, self.weight_cap, self.symmetric)
        return self._basis[n]

    def arities(self):
        return range(1, self.arity_cap + 1)

    def degree(self, t) -> int:
        return sum(self.M.degree(l) for l in vertex_labels(t))

    def arity(self, t) -> int:
        return arity_of(t)

    def unit(self) -> Vector:
        return {0: ONE}

    def _compose(self, x, i, y):
        if is_leaf(x):
            return {y: ONE}
        if is_leaf(y):
            return {x: ONE}
        return graft(x, i, y, self.M, self.symmetric)

    def _act(self, t, perm):
        if is_leaf(t):
            return {t: ONE}
        return act_tree(t, perm, self.M)

    def d(self, t) -> Vector:
        if self.gen_d is None or is_leaf(t):
            return {}
        return tree_derivation(t, self.gen_d, self.M, self.symmetric)

    def generator(self, label) -> Vector:
        return {corolla(label, self.M.arity(label)): ONE}

    def substitute(self, t, path, replacement: Vector) -> Vector:
        return substitute(t, path, replacement, self.M, self.symmetric)


def extend_morphism(label_map: Callable[[Hashable], Vector], P: Operad,
                    degree_of: Optional[Callable[[Hashable], int]] = None):
    """Unique operad morphism T(M) → P extending a degree-0 map M → P."""

    def f(X: Vector) -> Vector:
        return eval_vector(X, P, label_map, degree_of)

    return f


# ---------------------------------------------------------------------------
# cofree decomposition (admissible cuts)
# ---------------------------------------------------------------------------

def admissible_cuts(t) -> List[Tuple[object, List[object]]]:
    """All cuts of a tree into an upper root part and a lower forest.

    Returns pairs (upper, lowers).  The upper part is a tree whose leaves
    are the cut points, numbered left to right; `lowers` lists the subtree
    hanging below each cut point (a bare leaf where nothing hangs).  The
    empty upper part is represented by ``None`` with the whole tree below."""
    cuts: List[Tuple[object, List[object]]] = [(None, [t])]

    def uppers(node):
        # root-containing subtrees of `node`: (shape with holes, lowers)
        options = []
        for combo in product(*[_child_options(c) for c in node[1]]):
            options.append((node[0], combo))
        return options

    def _child_options_inner(c):
        return _child_options(c)

    for lab, combo in uppers(t):
        lowers: List[object] = []
        shape = (lab, tuple(_materialize(x, lowers) for x in combo))
        count = [0]
        shape = _number_holes(shape, count)
        cuts.append((shape, lowers))
    return cuts


def _child_options(c):
    # either cut here (hole) or keep the vertex and recurse
    opts = [("cut", c)]
    if not is_leaf(c):
        for combo in product(*[_child_options(g) for g in c[1]]):
            opts.append(("keep", c[0], combo))
    return opts


def _materialize(x, lowers):
    if x[0] == "cut":
        lowers.append(x[1])
        return ("hole",)
    _, lab, combo = x
    return (lab, tuple(_materialize(y, lowers) for y in combo))


def _number_holes(node, count):
    if node == ("hole",):
        count[0] += 1
        return count[0] - 1
    return (node[0], tuple(_number_holes(c, count) for c in node[1]))


# ---------------------------------------------------------------------------
# tree doubling Φ and the switch map
# ---------------------------------------------------------------------------

def tree_double(t, deg_left: Callable, deg_right: Callable):
    """Φ: a tree labelled by pairs (m, n) ↦ sign · (tree of m's) ⊗ (tree of n's).

    Labels are separated from m1⊗n1⊗m2⊗n2⊗… into m1⊗m2⊗…⊗n1⊗n2⊗…"""
    if is_leaf(t):
        return 1, t, t
    labs = vertex_labels(t)
    k = len(labs)
    degs, target = [], []
    for idx, (m, n) in enumerate(labs):
        degs += [deg_left(m), deg_right(n)]
        target += [idx, k + idx]
    sign = koszul_sign(target, degs)
    left = map_labels(t, lambda lab: lab[0])
    right = map_labels(t, lambda lab: lab[1])
    return sign, left, right


def switch_map(left, right, deg_left: Callable, deg_right: Callable):
    """Inverse of Φ on a fixed shape: recombine two equally shaped trees."""
    if _shape(left) != _shape(right):
        raise ValueError("switch map needs trees of the same shape")
    if is_leaf(left):
        return 1, left
    paths = vertex_paths(left)
    combined = left
    for p in paths:
        node = subtree(combined, p)
        combined = replace_at(combined, p, ((node[0], subtree(right, p)[0]), node[1]))
    sign, _, _ = tree_double(combined, deg_left, deg_right)
    return sign, combined


def _shape(t):
    if is_leaf(t):
        return t
    return (None, tuple(_shape(c) for c in t[1]))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def to_nested(t, label_str=str):
    """Nested-list form: a leaf is its 1-based input, a vertex is
    [label, child, child, …]."""
    if is_leaf(t):
        return t + 1
    return [label_str(t[0])] + [to_nested(c, label_str) for c in t[1]]


def from_nested(obj, label_parse=lambda s: s):
    if isinstance(obj, int):
        return obj - 1
    return (label_parse(obj[0]), tuple(from_nested(c, label_parse) for c in obj[1:]))


def schroeder_count(n: int, w: int) -> int:
    """Number of trees on n labelled leaves with w vertices, every vertex of
    arity ≥ 2, counted by an independent recursion on the root's blocks."""
    from math import comb

    @lru_cache(maxsize=None)
    def forests(m: int, k: int, wv: int) -> int:
        # ordered-by-min forests of k trees on m labelled leaves with wv vertices
        if k == 0:
            return 1 if m == 0 and wv == 0 else 0
        total = 0
        # the tree containing the smallest leaf has s leaves
        for s in range(1, m - k + 2):
            for wt in range(0, wv + 1):
                total += comb(m - 1, s - 1) * trees(s, wt) * forests(m - s, k - 1, wv - wt)
        return total

    @lru_cache(maxsize=None)
    def trees(m: int, wv: int) -> int:
        if m == 1:
            return 1 if wv == 0 else 0
        if wv == 0:
            return 0
        return sum(forests(m, k, wv - 1) for k in range(2, m + 1))

    return trees(n, w)
