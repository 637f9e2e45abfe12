"""Verification suites.

A suite is a list of checks.  Each check is a module-level function
``check(cfg) -> (passed, detail)`` where ``passed`` is True, False or None
(skipped because the verification would need more than the configured
caps) and ``detail`` is JSON-serialisable.
"""

from __future__ import annotations

import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, List, Optional, Tuple

from .exact_core import (GradedSpace, all_perms, desuspension_power_sign, koszul_sign, perm_compose,
                         perm_inverse, perm_sign, shift_word_sign)

PROFILES = {"default": {"arity_cap": 4, "weight_cap": 3}, "deep": {"arity_cap": 5, "weight_cap": 4}}


@dataclass
class Config:
    arity_cap: int = 4
    weight_cap: int = 3
    seed: int = 0
    samples: int = 100

    def __post_init__(self):
        if self.arity_cap < 2 or self.weight_cap < 2:
            raise ValueError("caps must be at least 2")


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: Optional[bool]
    seconds: float
    detail: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return {True: "PASS", False: "FAIL", None: "SKIP"}[self.passed]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


# ---------------------------------------------------------------------------
# signs
# ---------------------------------------------------------------------------

def check_permutation_group(cfg: Config):
    perms = all_perms(4)
    bad = 0
    for a in perms:
        if perm_compose(a, perm_inverse(a)) != tuple(range(4)):
            bad += 1
        for b in perms:
            if perm_sign(perm_compose(a, b)) != perm_sign(a) * perm_sign(b):
                bad += 1
    return bad == 0, {"failures": bad}


def check_koszul_rule(cfg: Config):
    bad = 0
    for p in all_perms(4):
        bad += koszul_sign(p, [0, 2, 0, 4]) != 1
        bad += koszul_sign(p, [1, 1, 3, -1]) != perm_sign(p)
    # x(odd) y(even) z(odd): moving z to the front passes y and x
    bad += koszul_sign((1, 2, 0), [1, 0, 1]) != -1
    return bad == 0, {"failures": int(bad)}


def check_suspension_powers(cfg: Config):
    got = {n: desuspension_power_sign(n) for n in range(1, 7)}
    want = {n: (-1) ** (n * (n - 1) // 2) for n in range(1, 7)}
    return got == want, {"signs": got}


def check_shift_words(cfg: Config):
    got = {"s s^-1": shift_word_sign([1, -1]), "s^-1 s": shift_word_sign([-1, 1]),
           "s s s^-1 s^-1": shift_word_sign([1, 1, -1, -1])}
    return got == {"s s^-1": -1, "s^-1 s": 1, "s s s^-1 s^-1": 1}, got


def check_generator_sign(cfg: Config):
    from .main_theorem import generator_sign
    got = {n: generator_sign(n) for n in range(2, 7)}
    want = {n: (-1) ** (n - 1 + n * (n - 1) // 2) for n in range(2, 7)}
    return got == want and got[2] == 1, {"signs": got}


# ---------------------------------------------------------------------------
# operads
# ---------------------------------------------------------------------------

def presented_dimensions(cap: int) -> Dict[str, List[int]]:
    from .smodule_operad import ass_data, com_data, lie_data, presented_operad
    return {name: [presented_operad(data(), cap).dim(n) for n in range(1, cap + 1)]
            for name, data in (("Com", com_data), ("Lie", lie_data), ("Ass", ass_data))}


def check_dimensions(cfg: Config):
    cap = max(cfg.arity_cap, 5)
    got = presented_dimensions(cap)
    want = {"Com": [1] * cap, "Lie": [factorial(n - 1) for n in range(1, cap + 1)],
            "Ass": [factorial(n) for n in range(1, cap + 1)]}
    return got == want, {"dims": got}


def check_operad_axioms(cfg: Config):
    from .operad_base import (check_action_is_right_action, check_equivariance, check_parallel,
                              check_sequential, check_unit)
    from .smodule_operad import As, Ass, Com, Lie
    rng = random.Random(cfg.seed)
    cap = cfg.arity_cap
    failures = []
    for P in (Com(cap + 1), Lie(cap + 1), Ass(cap + 1), As(cap + 1)):
        for _ in range(10):
            n1, n2 = rng.randint(1, 2), rng.randint(1, 2)
            x = rng.choice(P.basis(rng.randint(2, 3)))
            y = rng.choice(P.basis(n1 + 1))
            z = rng.choice(P.basis(n2))
            checks = {"sequential": check_sequential(P, x, y, z), "parallel": check_parallel(P, x, y, z),
                      "unit": check_unit(P, x)}
            if P.symmetric:
                checks["equivariance"] = check_equivariance(P, x, y)
                checks["right action"] = check_action_is_right_action(P, x)
            for k, ok in checks.items():
                if not ok:
                    failures.append([P.name, k, repr(x), repr(y)])
    return not failures, {"failures": failures}


def check_koszul_duals(cfg: Config):
    from .smodule_operad import ass_data, com_data, koszul_dual_operad, lie_data, presented_operad
    cap = cfg.arity_cap
    dims = {}
    for name, data in (("Com", com_data), ("Lie", lie_data), ("Ass", ass_data)):
        dual = koszul_dual_operad(presented_operad(data(), cap), cap)
        dims[name] = [dual.dim(n) for n in range(1, cap + 1)]
    want = {"Com": [factorial(n - 1) for n in range(1, cap + 1)], "Lie": [1] * cap,
            "Ass": [factorial(n) for n in range(1, cap + 1)]}
    return dims == want, {"dual dims": dims}


def check_bar_square(cfg: Config):
    from .barcobar import BarConstruction
    from .smodule_operad import Ass, Com, Lie
    out = {}
    for P in (Com(cfg.arity_cap), Lie(cfg.arity_cap), Ass(cfg.arity_cap)):
        B = BarConstruction(P, cfg.arity_cap, cfg.weight_cap)
        out[P.name] = all(B.check_d_squared(n) for n in range(2, cfg.arity_cap + 1))
    return all(out.values()), out


def check_cobar_square(cfg: Config):
    from .barcobar import a_infinity, check_d_squared, l_infinity
    out = {}
    for name, Om in (("L∞", l_infinity(cfg.arity_cap)), ("A∞", a_infinity(cfg.arity_cap))):
        out[name] = all(check_d_squared(Om, n) for n in range(2, cfg.arity_cap + 1))
    return all(out.values()), out


def check_canonical_pi(cfg: Config):
    from .barcobar import BarConstruction, canonical_pi
    from .smodule_operad import Ass, Com
    cap = min(cfg.arity_cap, 4)
    bad = {}
    for P in (Com(cap), Ass(cap)):
        B = BarConstruction(P, cap, cap - 1)
        pi = canonical_pi(B)
        bad[P.name] = sum(1 for n in range(2, cap + 1) for t in B.basis(n) if pi.mc_residual(t))
    return not any(bad.values()), {"non-zero residuals": bad}


# ---------------------------------------------------------------------------
# the morphisms M_Ψ
# ---------------------------------------------------------------------------

MORPHISMS = ("id_com", "id_lie", "id_ass", "u", "a", "id_as")


def chain_map_certificates(cap: int) -> Dict[str, Dict[int, bool]]:
    from .main_theorem import m_psi, stock_morphism
    out = {}
    for name in MORPHISMS:
        M = m_psi(stock_morphism(name, cap), cap)
        out[name] = {n: not M.chain_defect(n) for n in range(2, cap + 1)}
    return out


def check_chain_maps(cfg: Config):
    res = chain_map_certificates(cfg.arity_cap)
    return all(all(v.values()) for v in res.values()), res


def check_psi_identities(cfg: Config):
    from .main_theorem import psi_elements, stock_morphism
    res = {name: psi_elements(stock_morphism(name, cfg.arity_cap), cfg.arity_cap).verify(cfg.arity_cap)
           for name in MORPHISMS}
    return all(all(v.values()) for v in res.values()), res


def check_mutations(cfg: Config):
    from .main_theorem import mutation_trials, stock_morphism
    res = {}
    for k, name in enumerate(MORPHISMS[:5]):
        trials = mutation_trials(stock_morphism(name, cfg.arity_cap), cfg.samples, cfg.arity_cap, cfg.seed + k)
        res[name] = f"{sum(t[-1] for t in trials)}/{len(trials)}"
    return all(v.split("/")[0] == v.split("/")[1] for v in res.values()), res


def closed_form_report(cap: int) -> Dict[str, bool]:
    from .main_theorem import (apply_left, apply_right, closed_form_id_ass, closed_form_id_com,
                               closed_form_u, cobar_morphism_from_dual, m_psi, stock_morphism)
    ns = range(2, cap + 1)
    Mc = m_psi(stock_morphism("id_com", cap), cap)
    Ma = m_psi(stock_morphism("id_ass", cap), cap)
    Mu = m_psi(stock_morphism("u", cap), cap)
    a, u = stock_morphism("a", cap), stock_morphism("u", cap)
    Mlie = m_psi(a, cap)
    om_a = cobar_morphism_from_dual(a, Ma.omega, Mlie.omega)
    Mua = m_psi(u.compose_after(a), cap)
    return {
        "id_com": all(Mc.generator_image(n) == closed_form_id_com(Mc, n) for n in ns),
        "id_ass": all(Ma.generator_image(n) == closed_form_id_ass(Ma, n) for n in ns),
        "u": all(Mu.generator_image(n) == closed_form_u(Mu, n) for n in ns),
        "a = (1⊗i)∘M_Ass": all(Mlie.generator_image(n) == apply_right(om_a, Ma.generator_image(n)) for n in ns),
        "ua = (u⊗1)∘M_a": all(Mua.generator_image(n) == apply_left(u, Mlie.generator_image(n)) for n in ns),
        "ua = (1⊗i)∘M_u": all(Mua.generator_image(n) == apply_right(om_a, Mu.generator_image(n)) for n in ns),
    }


def check_closed_forms(cfg: Config):
    res = closed_form_report(cfg.arity_cap)
    return all(res.values()), res


def check_dual_picture(cfg: Config):
    """M_Ψ and M̄_Ψ agree through the pairing on two-vertex trees."""
    from .main_theorem import duality_defect, m_psi, mbar_psi, stock_morphism
    from .tree_calculus import enumerate_trees
    cap = min(cfg.arity_cap, 4)
    res = {}
    for name in ("id_com", "id_ass", "u"):
        psi = stock_morphism(name, cap)
        M, Mb = m_psi(psi, cap), mbar_psi(psi, cap, 2)
        bad = 0
        for n in range(2, cap + 1):
            for T in enumerate_trees(M.source.G, n, 2):
                for b in Mb.bar.basis(n):
                    bad += bool(duality_defect(M, Mb, T, b))
        res[name] = bad
    return not any(res.values()), {"defects": res}


def check_manin(cfg: Config):
    from .main_theorem import manin_factorisation_holds, manin_morphism, manin_square, stock_morphism
    cap = cfg.arity_cap
    res = {}
    for name in ("id_com", "id_ass", "u", "a"):
        psi = stock_morphism(name, cap)
        sq = manin_square(psi, cap)
        res[name] = {
            "well defined": manin_morphism(psi, cap).is_well_defined(),
            "factorises": manin_factorisation_holds(psi, cap),
            "l2 agree": sq[2][0] == sq[2][1] and bool(sq[2][0]),
            "higher vanish": all(not a and not b for n, (a, b) in sq.items() if n >= 3),
        }
    return all(all(v.values()) for v in res.values()), res


# ---------------------------------------------------------------------------
# transfer and tensor products
# ---------------------------------------------------------------------------

def htt_report(cap: int = 4, weight: int = 3) -> Dict[str, Dict]:
    from .corpus import htt_corpus
    from .htt import morphism_compat, structures_equal, two_structures
    out = {}
    for name, A, B, r, psi in htt_corpus(cap):
        data = two_structures(A, B, r, psi, cap)
        out[name] = {
            "brackets equal": structures_equal(data["path1"], data["path2"], cap),
            "non-zero higher": {n: len(data["path1"].bracket(n)) for n in range(3, cap + 1)},
            "morphisms": morphism_compat(A, B, r, psi, cap, weight, data),
        }
    return out


def check_htt_equality(cfg: Config):
    cap = min(cfg.arity_cap, 4)
    res = htt_report(cap, 3)
    ok = all(all(v["brackets equal"].values()) and all(v["morphisms"].values()) for v in res.values())
    return ok, res


def bifunctoriality_report(pairs: int = 5, seed: int = 7, cap: int = 4, weight: int = 3) -> List[Dict]:
    from .corpus import random_unital_endo, three_dim_lie, unital_com
    from .linfty_algebra import infinity_tensor_morphism, random_gauge, tensor_structure
    from .main_theorem import MPsi, stock_morphism
    psi = stock_morphism("id_com", cap)
    M = MPsi(psi, cap)
    A = unital_com(cap, 3)
    C = three_dim_lie(cap)
    rng = random.Random(seed)
    out = []
    for _ in range(pairs):
        g = random_gauge(C, rng, name="C1")
        g2 = random_gauge(g.target, rng, name="C2")
        f, f2 = random_unital_endo(rng), random_unital_endo(rng)
        T0, T1, T2 = (tensor_structure(A, X, psi, M) for X in (C, g.target, g2.target))
        F1 = infinity_tensor_morphism(f, A, A, g, psi, T0, T1, M)
        F2 = infinity_tensor_morphism(f2, A, A, g2, psi, T1, T2, M)
        ff: Dict = {}
        for (a, b), c in f.items():
            for (a2, b2), c2 in f2.items():
                if b2 == a:
                    ff[(a2, b)] = ff.get((a2, b), 0) + c2 * c
        Fc = infinity_tensor_morphism(ff, A, A, g2.compose_after(g, weight), psi, T0, T2, M)
        out.append({
            "g certified": g.is_coalgebra_map(weight) and g2.is_coalgebra_map(weight),
            "f⊗g certified": F1.is_coalgebra_map(weight) and F2.is_coalgebra_map(weight),
            "composite certified": Fc.is_coalgebra_map(weight),
            "composition law": F2.compose_after(F1, weight).equals(Fc, weight),
        })
    return out


def check_bifunctoriality(cfg: Config):
    res = bifunctoriality_report(5, cfg.seed + 7, 4, 3)
    return all(all(r.values()) for r in res), {"pairs": res}


# ---------------------------------------------------------------------------
# Maurer–Cartan elements
# ---------------------------------------------------------------------------

def mc_equivalence_report(samples: int, seed: int = 0, cap: int = 4) -> Dict[str, Dict]:
    from .corpus import mc_pairs, small_coalgebra_algebra
    from .linfty_algebra import dual_coalgebra
    from .main_theorem import stock_morphism
    from .mc_and_cobar import (FilteredAlgebra, MCTwComparison, degree_minus_one, mc_solutions,
                               random_degree_minus_one)
    out = {}
    V = GradedSpace("X", [("x", 0), ("y", 0)])
    for qname, P, mname in mc_pairs(cap):
        C = small_coalgebra_algebra(qname, cap=cap)
        A = FilteredAlgebra.free(P, V, 3).A
        cmp = MCTwComparison(stock_morphism(mname, cap), dual_coalgebra(C), A)
        rng = random.Random(seed)
        match = simultaneous = mc_zero = 0
        for _ in range(samples):
            r = cmp.compare(random_degree_minus_one(cmp.H, rng))
            match += all(r["arity_match"].values())
            simultaneous += r["simultaneous"]
            mc_zero += r["mc_zero"]
        # exact solutions along each degree −1 direction put points on the locus
        on_locus = locus_ok = 0
        for i in degree_minus_one(cmp.H):
            for sol in mc_solutions(cmp.H, [{i: Fraction(1)}]):
                r = cmp.compare(sol)
                on_locus += 1
                locus_ok += r["mc_zero"] and r["tw_zero"] and all(r["arity_match"].values())
        zero = cmp.compare({})
        out[qname] = {"samples": samples, "arity-wise match": match, "simultaneous": simultaneous,
                      "random on MC locus": mc_zero, "exact solutions": on_locus,
                      "exact solutions on both loci": locus_ok,
                      "zero element": zero["mc_zero"] and zero["tw_zero"]}
    return out


def check_mc_equivalence(cfg: Config):
    res = mc_equivalence_report(cfg.samples, cfg.seed, 4)
    ok = all(v["arity-wise match"] == v["samples"] == v["simultaneous"] and v["zero element"]
             and v["exact solutions on both loci"] == v["exact solutions"] for v in res.values())
    return ok, res


def mc_examples(cap: int = 4):
    """The one-parameter and two-dimensional examples with their exact MC
    solutions: yields (name, bijection, directions, solutions)."""
    from .corpus import small_coalgebra_algebra, square_zero_pair
    from .linfty_algebra import dual_coalgebra
    from .main_theorem import stock_morphism
    from .mc_and_cobar import FilteredAlgebra, MCBijection, degree_minus_one, mc_solutions
    from .smodule_operad import Com
    psi = stock_morphism("id_com", cap)
    C = small_coalgebra_algebra("Com", 2, 3, 0, 5, cap)
    D = dual_coalgebra(C)
    F1 = FilteredAlgebra.free(Com(cap), GradedSpace("X", [("x", 0)]), 3)
    B1 = MCBijection(psi, D, F1.A, 3)
    dirs1 = [{i: Fraction(1)} for i in degree_minus_one(B1.H)][:1]
    yield "one-parameter", B1, dirs1, mc_solutions(B1.H, dirs1), C
    A2 = square_zero_pair(cap)
    B2 = MCBijection(psi, D, A2, 2)
    dirs2 = [{i: Fraction(1)} for i in degree_minus_one(B2.H) if B2.H.V.label(i)[1] != "xy"][:2]
    yield "two-dimensional", B2, dirs2, mc_solutions(B2.H, dirs2), C


def bijection_report(cap: int = 4) -> Dict[str, Dict]:
    from .main_theorem import stock_morphism
    from .mc_and_cobar import tensor_mc_bijection
    psi = stock_morphism("id_com", cap)
    out = {}
    for name, B, dirs, sols, C in mc_examples(cap):
        certs = [B.certify(s) for s in sols]
        entry = {"solutions": [{str(k): str(v) for k, v in s.items()} for s in sols],
                 "certificates": certs}
        if name == "two-dimensional":
            entry["tensor"] = tensor_mc_bijection(psi, B.A, C, 2, sols)
        out[name] = entry
    return out


def check_bijections(cfg: Config):
    res = bijection_report(4)
    ok = all(all(all(c.values()) for c in v["certificates"]) and v["certificates"] for v in res.values())
    ok = ok and all(all(t.values()) for t in res["two-dimensional"]["tensor"])
    return ok, res


def check_complete_cobar(cfg: Config):
    from .corpus import mc_pairs, small_coalgebra_algebra
    from .linfty_algebra import dual_coalgebra
    from .main_theorem import stock_morphism
    from .mc_and_cobar import CompleteCobar
    res = {}
    for qname, P, mname in mc_pairs(4):
        Om = CompleteCobar(stock_morphism(mname, 4), dual_coalgebra(small_coalgebra_algebra(qname)), 3)
        res[qname] = {"dim": Om.dim, "d² defects": len(Om.square_defect())}
    return all(v["d² defects"] == 0 for v in res.values()), res


def filtered_report(samples: int = 20, seed: int = 0, depth: int = 3) -> Dict[str, Dict]:
    from .mc_and_cobar import FilteredAlgebra, random_complete_element
    from .smodule_operad import Ass, Com, Lie
    V = GradedSpace("V", [("x", 0), ("y", 0)])
    out = {}
    for P in (Lie(depth + 2), Ass(depth + 2), Com(depth + 2)):
        F = FilteredAlgebra.free(P, V, depth)
        rng = random.Random(seed)
        agree = sum(F.gamma_hat(x) == F.direct(x)
                    for x in (random_complete_element(F, depth + 2, rng) for _ in range(samples)))
        out[P.name] = {"filtration violations": len(F.violations()), "agree": agree, "samples": samples}
    return out


def check_filtered(cfg: Config):
    res = filtered_report(min(cfg.samples, 20), cfg.seed, 3)
    return all(v["filtration violations"] == 0 and v["agree"] == v["samples"] for v in res.values()), res


def deformation_report(cap: int = 4) -> Dict[str, object]:
    from .corpus import truncated_polynomial
    from .linfty_algebra import binary_algebra
    from .mc_and_cobar import deformation_complex, strict_map_as_mc
    from .smodule_operad import Com
    X = truncated_polynomial(cap, "X")
    H = deformation_complex(X, X, 2, 3)
    morphisms = [H.mc_residual(strict_map_as_mc(X, X, {(0, 0): lam, (1, 1): lam * lam}, H))
                 for lam in (Fraction(1), Fraction(2), Fraction(-1, 3))]
    perturbed = H.mc_residual(strict_map_as_mc(X, X, {(0, 0): 1, (1, 1): 2}, H))
    T = binary_algebra(Com(cap), GradedSpace("T", [("t", 0)]), {}, cap, "T")
    HT = deformation_complex(T, T, 2, 3)
    return {"dim": H.V.dim, "morphisms are MC": all(not r for r in morphisms),
            "perturbation detected": bool(perturbed),
            "trivial algebra has no brackets": all(not HT.bracket(n) for n in range(2, cap + 1)),
            "valid": H.is_valid(cap)}


def check_deformation_complex(cfg: Config):
    res = deformation_report(4)
    return all(v for k, v in res.items() if k != "dim"), res


def jacobi_report(cap: int = 4) -> Dict[str, bool]:
    """Generalised Jacobi identities, operadic and as D² = 0, for every kind
    of homotopy algebra the package builds."""
    from .corpus import (htt_corpus, mc_pairs, small_coalgebra_algebra, three_dim_lie, truncated_polynomial,
                         unital_com)
    from .htt import transfer
    from .linfty_algebra import (dual_coalgebra, hom_structure, linfty_from_lie, random_gauge,
                                 strict_as_infinity, tensor_structure)
    from .main_theorem import stock_morphism
    from .mc_and_cobar import FilteredAlgebra, deformation_complex

    def both(H):
        return H.is_valid(cap) and not H.shifted_square_defect(cap)

    out = {}
    psi = stock_morphism("id_com", cap)
    C = three_dim_lie(cap)
    out["gauge transported"] = both(random_gauge(C, random.Random(3)).target)
    out["tensor A⊗C"] = both(tensor_structure(unital_com(cap, 3), C, psi))
    for name, A, B, r, p in htt_corpus(cap):
        if name == "id_com":
            Binf = linfty_from_lie(B)
        else:
            Binf = strict_as_infinity(B, "Ass" if name == "id_ass" else "As", cap)
        out[f"transferred ({name})"] = both(transfer(Binf, r, cap))
    V = GradedSpace("X", [("x", 0), ("y", 0)])
    for qname, P, mname in mc_pairs(cap):
        D = dual_coalgebra(small_coalgebra_algebra(qname, cap=cap))
        # depth 2 keeps the planar word count (dim⁴) manageable
        out[f"hom ({qname})"] = both(hom_structure(D, FilteredAlgebra.free(P, V, 2).A, stock_morphism(mname, cap), cap))
    X = truncated_polynomial(cap)
    out["deformation complex"] = both(deformation_complex(X, X, 2, 3))
    return out


def check_jacobi(cfg: Config):
    res = jacobi_report(4)
    return all(res.values()), res


# ---------------------------------------------------------------------------
# registry and runner
# ---------------------------------------------------------------------------

SUITES: Dict[str, List[Tuple[str, Callable]]] = {
    "signs": [("permutation group", check_permutation_group), ("koszul rule", check_koszul_rule),
              ("suspension powers", check_suspension_powers), ("shift words", check_shift_words),
              ("generator sign", check_generator_sign)],
    "operad-axioms": [("dimensions", check_dimensions), ("axioms", check_operad_axioms),
                      ("koszul duals", check_koszul_duals), ("bar d²", check_bar_square),
                      ("cobar d²", check_cobar_square), ("canonical π", check_canonical_pi)],
    "main-theorem": [("chain maps", check_chain_maps), ("Ψ_n identities", check_psi_identities),
                     ("mutations", check_mutations), ("closed forms", check_closed_forms),
                     ("dual picture", check_dual_picture)],
    "manin-square": [("manin square", check_manin)],
    "htt-equality": [("transfer pipelines", check_htt_equality), ("bifunctoriality", check_bifunctoriality),
                     ("generalised jacobi", check_jacobi)],
    "mc-equivalence": [("MC vs twisting", check_mc_equivalence)],
    "bijections": [("MC bijections", check_bijections), ("complete cobar d²", check_complete_cobar),
                   ("filtered completion", check_filtered), ("deformation complex", check_deformation_complex)],
}


def _run_one(job):
    suite, name, func, cfg = job
    t = time.time()
    try:
        passed, detail = func(cfg)
    except Exception as exc:  # reported, never swallowed into a PASS
        passed, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
    return CheckResult(suite, name, passed, round(time.time() - t, 3), _jsonable(detail))


def threads() -> int:
    try:
        return max(1, int(os.environ.get("OPERAD_FORGE_THREADS", "1")))
    except ValueError:
        return 1


def run_suite(suite: str, cfg: Config) -> List[CheckResult]:
    names = list(SUITES) if suite == "all" else [suite]
    for s in names:
        if s not in SUITES:
            raise ValueError(f"unknown suite {s!r}; expected one of {', '.join(list(SUITES) + ['all'])}")
    jobs = [(s, name, func, cfg) for s in names for name, func in SUITES[s]]
    n = threads()
    if n > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            return list(ex.map(_run_one, jobs))
    return [_run_one(j) for j in jobs]


def report(results: List[CheckResult]) -> dict:
    return {"passed": all(r.passed is not False for r in results),
            "checks": [dict(asdict(r), status=r.status) for r in results]}
