"""
Common protocol for S-modules and operads given by partial compositions.

An operad here is anything exposing, per basis element, its arity and
degree, a right action of permutations, partial compositions ∘_i and a
differential.  Elements are sparse vectors {basis key: Fraction}.
"""

from __future__ import annotations

from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .exact_core import (ONE, Vector, all_perms, perm_compose, perm_inverse, vadd, vscale)

Perm = Tuple[int, ...]


class SModule:
    """Arity-graded family of based graded spaces with a right action of the
    symmetric groups (or none, for non-symmetric modules)."""

    name = "M"
    symmetric = True

    def basis(self, n: int) -> List[Hashable]:
        raise NotImplementedError

    def arities(self) -> Sequence[int]:
        raise NotImplementedError

    def degree(self, key) -> int:
        raise NotImplementedError

    def arity(self, key) -> int:
        raise NotImplementedError

    def act(self, key, perm: Perm) -> Vector:
        if tuple(perm) == tuple(range(len(perm))):
            return {key: ONE}
        raise NotImplementedError

    def act_vec(self, vec: Vector, perm: Perm) -> Vector:
        if tuple(perm) == tuple(range(len(perm))):
            return dict(vec)
        out: Vector = {}
        for k, c in vec.items():
            vadd(out, self.act(k, perm), c)
        return out

    def dim(self, n: int) -> int:
        return len(self.basis(n))


class Operad(SModule):
    """Operad presented by partial compositions.  Subclasses implement the
    basis-level `compose`, `act`, `unit` and optionally `d`."""

    name = "P"

    def __init__(self):
        self._compose_cache: Dict = {}
        self._act_cache: Dict = {}

    # -- basis level, to override ------------------------------------------
    def _compose(self, x, i: int, y) -> Vector:
        raise NotImplementedError

    def _act(self, x, perm: Perm) -> Vector:
        raise NotImplementedError

    def unit(self) -> Vector:
        raise NotImplementedError

    def d(self, x) -> Vector:
        return {}

    # -- cached basis level --------------------------------------------------
    def compose(self, x, i: int, y) -> Vector:
        key = (x, i, y)
        r = self._compose_cache.get(key)
        if r is None:
            r = self._compose(x, i, y)
            self._compose_cache[key] = r
        return r

    def act(self, x, perm: Perm) -> Vector:
        perm = tuple(perm)
        if perm == tuple(range(len(perm))):
            return {x: ONE}
        if not self.symmetric:
            raise ValueError(f"{self.name} is non-symmetric")
        key = (x, perm)
        r = self._act_cache.get(key)
        if r is None:
            r = self._act(x, perm)
            self._act_cache[key] = r
        return r

    # -- element level -------------------------------------------------------
    def compose_vec(self, X: Vector, i: int, Y: Vector) -> Vector:
        out: Vector = {}
        for x, cx in X.items():
            for y, cy in Y.items():
                vadd(out, self.compose(x, i, y), cx * cy)
        return out

    def d_vec(self, X: Vector) -> Vector:
        out: Vector = {}
        for x, c in X.items():
            vadd(out, self.d(x), c)
        return out

    def gamma(self, X: Vector, Ys: Sequence[Vector]) -> Vector:
        """Full composition γ(X; Y_1,…,Y_k), factors taken in the order
        X ⊗ Y_1 ⊗ … ⊗ Y_k."""
        out = X
        pos = 1
        for Y in Ys:
            out = self.compose_vec(out, pos, Y)
            pos += self.vec_arity(Y)
        return out

    def vec_arity(self, X: Vector) -> int:
        for k in X:
            return self.arity(k)
        raise ValueError("arity of the zero vector is undefined")

    def vec_degree(self, X: Vector) -> Optional[int]:
        degs = {self.degree(k) for k in X}
        if len(degs) > 1:
            raise ValueError("inhomogeneous element")
        return degs.pop() if degs else None


# ---------------------------------------------------------------------------
# axiom certificates shared by every operad
# ---------------------------------------------------------------------------

def check_sequential(P: Operad, x, y, z) -> bool:
    """(x∘_i y)∘_{i+j−1} z = x∘_i(y∘_j z) for all i, j."""
    m, n = P.arity(x), P.arity(y)
    for i in range(1, m + 1):
        xy = P.compose(x, i, y)
        for j in range(1, n + 1):
            lhs = P.compose_vec(xy, i + j - 1, {z: ONE})
            rhs = P.compose_vec({x: ONE}, i, P.compose(y, j, z))
            if lhs != rhs:
                return False
    return True


def check_parallel(P: Operad, x, y, z) -> bool:
    """(x∘_i y)∘_{k+n−1} z = (−1)^{|y||z|}(x∘_k z)∘_i y for i < k."""
    m, n, p = P.arity(x), P.arity(y), P.arity(z)
    sign = -1 if (P.degree(y) * P.degree(z)) % 2 else 1
    for i in range(1, m + 1):
        for k in range(i + 1, m + 1):
            lhs = P.compose_vec(P.compose(x, i, y), k + n - 1, {z: ONE})
            rhs = vscale(P.compose_vec(P.compose(x, k, z), i, {y: ONE}), sign)
            if lhs != rhs:
                return False
    return True


def check_equivariance(P: Operad, x, y) -> bool:
    """x^σ ∘_i y^τ = (x ∘_j y)^π for the slot j and block permutation π
    computed by `induced_block_perm`; all σ ∈ S_m, τ ∈ S_n and slots i."""
    m, n = P.arity(x), P.arity(y)
    for sigma in all_perms(m):
        xs = P.act(x, sigma)
        for tau in all_perms(n):
            yt = P.act(y, tau)
            for i in range(1, m + 1):
                j, pi = induced_block_perm(sigma, i, tau)
                if P.compose_vec(xs, i, yt) != P.act_vec(P.compose(x, j, y), pi):
                    return False
    return True


def induced_block_perm(sigma: Perm, i: int, tau: Perm) -> Tuple[int, Perm]:
    """Return (j, π) with x^σ ∘_i y^τ = (x ∘_j y)^π.

    Under the right action x^σ(a) = x(a_{σ^{-1}(0)}, …), slot s of x reads
    argument σ^{-1}(s); we list, for every input position of x ∘_j y, the
    argument of the composite it reads, which is π^{-1}."""
    m, n = len(sigma), len(tau)
    sinv, tinv = perm_inverse(sigma), perm_inverse(tau)
    j0 = sigma[i - 1]
    reads: List[int] = []
    for s in range(m):
        if s == j0:
            reads.extend(i - 1 + tinv[q] for q in range(n))
        else:
            k = sinv[s]
            reads.append(k if k < i - 1 else k + n - 1)
    return j0 + 1, perm_inverse(reads)


def check_derivation(P: Operad, x, y) -> bool:
    """d(x∘_i y) = dx∘_i y + (−1)^{|x|} x∘_i dy."""
    sign = -1 if P.degree(x) % 2 else 1
    for i in range(1, P.arity(x) + 1):
        lhs = P.d_vec(P.compose(x, i, y))
        rhs = P.compose_vec(P.d(x), i, {y: ONE})
        vadd(rhs, P.compose_vec({x: ONE}, i, P.d(y)), sign)
        if lhs != rhs:
            return False
    return True


def check_unit(P: Operad, x) -> bool:
    u = P.unit()
    if P.compose_vec(u, 1, {x: ONE}) != {x: ONE}:
        return False
    return all(P.compose_vec({x: ONE}, i, u) == {x: ONE} for i in range(1, P.arity(x) + 1))


def check_action_is_right_action(P: Operad, x) -> bool:
    n = P.arity(x)
    for s in all_perms(n):
        for t in all_perms(n):
            if P.act_vec(P.act(x, s), t) != P.act(x, perm_compose(s, t)):
                return False
    return True
