"""Command-line front end: ``operad-forge {build-operad, m-psi, verify}``.

All output is JSON.  Exit codes: 0 success, 1 a verification failed,
2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional

from .exact_core import Vector

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2


def serialise(obj):
    """Nested lists for trees and labels, strings for rationals."""
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    if isinstance(obj, tuple):
        return [serialise(o) for o in obj]
    if isinstance(obj, list):
        return [serialise(o) for o in obj]
    if isinstance(obj, dict):
        return {str(k): serialise(v) for k, v in obj.items()}
    return obj


def vector_entries(vec: Vector) -> list:
    """A vector as a sorted list of [key, coefficient] pairs."""
    return [[serialise(k), serialise(Fraction(c))] for k, c in sorted(vec.items(), key=lambda kv: repr(kv[0]))]


def _emit(payload: dict, out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# build-operad
# ---------------------------------------------------------------------------

def load_operad(source: str, arity_cap: int):
    """A stock name (com, lie, ass, as) or a JSON presentation file."""
    from .smodule_operad import (ass_data, com_data, lie_data, ns_as, presentation_from_json,
                                 presented_operad)
    stock = {"com": com_data, "lie": lie_data, "ass": ass_data}
    key = source.lower()
    if key in stock:
        return presented_operad(stock[key](), arity_cap)
    if key == "as":
        return ns_as(arity_cap)
    path = Path(source)
    if not path.exists():
        raise ValueError(f"unknown operad {source!r}: not a stock name (com, lie, ass, as) or a file")
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return presented_operad(presentation_from_json(obj), arity_cap)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: malformed presentation ({exc})") from exc
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def operad_dump(P, arity_cap: int) -> dict:
    ns = range(1, arity_cap + 1)
    basis = {n: list(P.basis(n)) for n in ns}
    index = {n: {b: k for k, b in enumerate(basis[n])} for n in ns}

    def coords(vec: Vector, n: int) -> list:
        return [[index[n][k], serialise(Fraction(c))] for k, c in sorted(vec.items(), key=lambda kv: index[n][kv[0]])]

    action = {}
    if P.symmetric:
        for n in ns:
            mats = {}
            for k in range(n - 1):
                perm = list(range(n))
                perm[k], perm[k + 1] = perm[k + 1], perm[k]
                mats[f"s{k + 1}"] = [coords(P.act(b, tuple(perm)), n) for b in basis[n]]
            action[n] = mats
    composition = {}
    for m in ns:
        for n in ns:
            if m + n - 1 > arity_cap or m == 1 or n == 1:
                continue
            for i in range(1, m + 1):
                composition[f"{m},{i},{n}"] = [[a, b, coords(P.compose(x, i, y), m + n - 1)]
                                               for a, x in enumerate(basis[m]) for b, y in enumerate(basis[n])]
    return {"name": P.name, "symmetric": P.symmetric, "arity_cap": arity_cap,
            "dims": [len(basis[n]) for n in ns],
            "basis": {n: [serialise(b) for b in basis[n]] for n in ns},
            "action": action, "composition": composition}


def cmd_build_operad(args) -> int:
    P = load_operad(args.operad, args.arity_cap)
    _emit(operad_dump(P, args.arity_cap), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# m-psi
# ---------------------------------------------------------------------------

def cmd_m_psi(args) -> int:
    from .main_theorem import m_psi, stock_morphism
    psi = stock_morphism(args.psi, args.arity_cap)
    M = m_psi(psi, args.arity_cap, args.weight_cap)
    images = {}
    for n in range(2, args.arity_cap + 1):
        images[f"{'a' if not M.symmetric else 'l'}_{n}"] = vector_entries(M.generator_image(n))
    payload = {"psi": args.psi, "arity_cap": args.arity_cap, "generators": images}
    code = EXIT_OK
    if args.check:
        cert = {n: not M.chain_defect(n) for n in range(2, args.arity_cap + 1)}
        passed = all(cert.values())
        payload["chain_map"] = {"status": "PASS" if passed else "FAIL", "per_arity": serialise(cert)}
        code = EXIT_OK if passed else EXIT_FAILED
    _emit(payload, args.out)
    return code


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    from .verify import PROFILES, Config, report, run_suite
    caps = dict(PROFILES[args.profile])
    if args.arity_cap is not None:
        caps["arity_cap"] = args.arity_cap
    if args.weight_cap is not None:
        caps["weight_cap"] = args.weight_cap
    cfg = Config(seed=args.seed, samples=args.samples, **caps)
    results = run_suite(args.suite, cfg)
    payload = {"suite": args.suite, "config": serialise(vars(cfg)), **report(results)}
    _emit(payload, args.out)
    for r in results:
        print(f"{r.status} {r.suite}: {r.name} ({r.seconds}s)", file=sys.stderr)
    return EXIT_OK if payload["passed"] else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    from .verify import PROFILES, SUITES
    parser = argparse.ArgumentParser(prog="operad-forge", description="Exact operad and homotopy-algebra computations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-operad", help="dump a presented operad: dimensions, actions, compositions")
    p.add_argument("operad", help="com, lie, ass, as or a JSON presentation file")
    p.add_argument("--arity-cap", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_build_operad)

    p = sub.add_parser("m-psi", help="images of the generators under M_Ψ")
    p.add_argument("psi", choices=["id_com", "id_lie", "id_ass", "id_as", "u", "a"])
    p.add_argument("--arity-cap", type=int, default=4)
    p.add_argument("--weight-cap", type=int, default=None)
    p.add_argument("--check", action="store_true", help="certify the chain-map property")
    p.add_argument("--out")
    p.set_defaults(func=cmd_m_psi)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=list(SUITES) + ["all"])
    p.add_argument("--profile", choices=list(PROFILES), default="default")
    p.add_argument("--arity-cap", type=int, default=None)
    p.add_argument("--weight-cap", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Iterable[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    for cap in ("arity_cap", "weight_cap"):
        val = getattr(args, cap, None)
        if val is not None and val < 2:
            print(f"error: --{cap.replace('_', '-')} must be at least 2", file=sys.stderr)
            return EXIT_INVALID
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
