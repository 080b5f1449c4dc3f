"""Command-line interface: construct, verify, convert, and inspect designs.

Exit codes are a stable contract: 0 verified/ok, 1 verification failure,
2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import classical, construct, designfile, fixtures, qdesign, qoa
from .designfile import DesignFormatError, load_design, save_design
from .qdesign import TauPattern

_EXAMPLE_PARTS = {
    "iqls4": ("qls4_7", "incomplete4", "iqls"),
    "qls4": ("qls4_7", "filled4", "qls"),
    "piqls7": ("qls4_7", "incomplete7", "iqls"),
    "qls7": ("qls4_7", "filled7", "qls"),
}


def _tol_default() -> float:
    env = os.environ.get("QCDESIGN_TOL")
    return float(env) if env else 1e-9


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcdesign",
        description="Construct and verify quantum combinatorial designs.",
    )
    parser.add_argument("--tol", type=float, default=None,
                        help="comparison tolerance (default 1e-9 or QCDESIGN_TOL)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for subset checks")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for randomized patterns and unitaries")
    parser.add_argument("--json", action="store_true", dest="as_json",
                        help="machine-readable verdicts on stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    con = sub.add_parser("construct", help="run a construction and write its output")
    consub = con.add_subparsers(dest="construction", required=True)

    p = consub.add_parser("mols", help="pairwise orthogonal squares over GF(q)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--count", type=int, default=None, help="keep only this many squares")
    p.add_argument("-o", "--output", required=True)

    p = consub.add_parser("sols", help="self-orthogonal square over GF(q)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--lam", type=int, default=None, help="field coefficient")
    p.add_argument("-o", "--output", required=True)

    p = consub.add_parser("molc", help="orthogonal cubes from the strength-3 array")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("-o", "--output", required=True)

    p = consub.add_parser("moqls", help="lifted orthogonal pair of order d1*d2")
    p.add_argument("--d1", type=int, required=True)
    p.add_argument("--d2", type=int, required=True)
    p.add_argument("--pattern", default="default",
                   choices=["default", "random", "moqls12"])
    p.add_argument("--unitaries", default="dft",
                   choices=["dft", "random", "moqls12"])
    p.add_argument("-o", "--output", required=True)

    p = consub.add_parser("moqlc", help="lifted orthogonal cube triple of order d1*d2")
    p.add_argument("--d1", type=int, required=True)
    p.add_argument("--d2", type=int, required=True)
    p.add_argument("--pattern", default="default",
                   choices=["default", "random", "moqlc16"])
    p.add_argument("--unitaries", default="dft",
                   choices=["dft", "random", "quartet16"])
    p.add_argument("-o", "--output", required=True)

    p = consub.add_parser("soqls-fill",
                          help="order-16 self-orthogonal square by hole filling")
    p.add_argument("--lam", type=int, default=None,
                   help="use the GF(4) square with this coefficient as filler")
    p.add_argument("--unitaries", default="quartet16", choices=["quartet16", "dft"])
    p.add_argument("-o", "--output", required=True)

    p = consub.add_parser("weighting",
                          help="blow up a unit-hole orthogonal pair by an orthogonal pair")
    p.add_argument("--holes", type=int, required=True, help="hole count q (prime power)")
    p.add_argument("--m", type=int, required=True, help="weight order (prime power)")
    p.add_argument("-o", "--output", required=True)

    p = consub.add_parser("hsoqls-product",
                          help="blow up a unit-hole self-orthogonal square")
    p.add_argument("--holes", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("-o", "--output", required=True)

    p = consub.add_parser("qoa", help="quantum orthogonal array from a design file")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("-o", "--output", required=True)

    p = consub.add_parser("state", help="superposed pure state from an array file")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("verify", help="verify a design file")
    p.add_argument("file")
    p.add_argument("--property", dest="prop", default=None,
                   help="override the inferred property")
    p.add_argument("--k", type=int, default=None, help="uniformity order for states")
    p.add_argument("--uniform", action="store_true",
                   help="check k-uniformity of a state file")

    p = sub.add_parser("example", help="write a named reference design")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true", dest="list_names")
    p.add_argument("-o", "--output")

    p = sub.add_parser("convert", help="convert between design representations")
    p.add_argument("file")
    p.add_argument("--to", dest="target", required=True,
                   choices=["qoa", "gmoqls", "gmoqlc"])
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("capability", help="lower bounds on design families")
    p.add_argument("order", type=int)
    return parser


# ---------------------------------------------------------------------------
# construct


def _rng(args) -> np.random.Generator:
    return np.random.default_rng(args.seed)


def _random_pattern(rng, shape) -> TauPattern:
    while True:
        grid = rng.random(shape) < 0.5
        if grid.any() and not grid.all():
            return TauPattern(grid)


def _random_blocks(rng, outer, inner):
    from scipy.stats import unitary_group

    blocks = [unitary_group.rvs(inner, random_state=rng) for _ in range(outer)]
    return construct.BlockUnitary(tuple(blocks))


def _moqls_pieces(args):
    mols_a = classical.mols_prime_power(args.d1)[:2]
    mols_b = classical.mols_prime_power(args.d2)[:2]
    if len(mols_a) < 2 or len(mols_b) < 2:
        raise ValueError("both factors need at least two orthogonal squares")
    rng = _rng(args)
    if args.unitaries == "moqls12":
        if (args.d1, args.d2) != (4, 3):
            raise ValueError("the stored order-3 quartet needs --d1 4 --d2 3")
        blocks = construct.BlockUnitary(fixtures.moqls12_blocks())
    elif args.unitaries == "random":
        blocks = _random_blocks(rng, args.d1, args.d2)
    else:
        blocks = construct.default_block_unitary(args.d1, args.d2)
    if args.pattern == "moqls12":
        if (args.d1, args.d2) != (4, 3):
            raise ValueError("the stored pattern needs --d1 4 --d2 3")
        mols_a = [classical.square(fixtures._L1), classical.square(fixtures._L2)]
        mols_b = [classical.square(fixtures._K1), classical.square(fixtures._K2)]
        patterns = list(fixtures.moqls12_patterns())
    elif args.pattern == "random":
        patterns = [_random_pattern(rng, (args.d1, args.d1)) for _ in mols_a]
    else:
        patterns = None
    return mols_a, mols_b, blocks, patterns


def _run_construct(args, tol: float):
    kind = args.construction
    if kind == "mols":
        squares = classical.mols_prime_power(args.q)
        if args.count:
            squares = squares[: args.count]
        return squares, {"property": "mols", "construction": f"mols q={args.q}"}
    if kind == "sols":
        lam = args.lam if args.lam is not None else classical.sols_admissible_lams(args.q)[0]
        return (
            classical.sols_prime_power(args.q, lam),
            {"property": "sols", "construction": f"sols q={args.q} lam={lam}"},
        )
    if kind == "molc":
        cubes = classical.oa_to_molc(classical.oa_strength3_rs(args.q))
        if args.count:
            cubes = cubes[: args.count]
        return cubes, {"property": "molc", "construction": f"molc q={args.q}"}
    if kind == "moqls":
        mols_a, mols_b, blocks, patterns = _moqls_pieces(args)
        pair = construct.moqls_from_mols(mols_a, mols_b, blocks, patterns)
        if not qdesign.verify_moqls(pair, tol):
            raise AssertionError("constructed pair failed self-verification")
        meta = {
            "property": "moqls",
            "construction": f"moqls d1={args.d1} d2={args.d2} "
                            f"pattern={args.pattern} unitaries={args.unitaries}",
        }
        return pair, meta
    if kind == "moqlc":
        cubes_a = classical.oa_to_molc(classical.oa_strength3_rs(args.d1))[:3]
        cubes_b = classical.oa_to_molc(classical.oa_strength3_rs(args.d2))[:3]
        rng = _rng(args)
        if args.unitaries == "quartet16":
            if args.d2 != 4:
                raise ValueError("the stored order-4 quartet needs --d2 4")
            blocks = construct.BlockUnitary(fixtures.quartet16_blocks()[: args.d1])
            if args.d1 != 4:
                raise ValueError("the stored order-4 quartet needs --d1 4")
        elif args.unitaries == "random":
            blocks = _random_blocks(rng, args.d1, args.d2)
        else:
            blocks = construct.default_block_unitary(args.d1, args.d2)
        if args.pattern == "moqlc16":
            if (args.d1, args.d2) != (4, 4):
                raise ValueError("the stored pattern needs --d1 4 --d2 4")
            cubes_a = cubes_b = fixtures.molc_4()
            patterns = list(fixtures.moqlc16_patterns())
        elif args.pattern == "random":
            patterns = [
                _random_pattern(rng, (args.d1,) * 3) for _ in range(3)
            ]
        else:
            patterns = None
        triple = construct.moqlc_from_molc(cubes_a, cubes_b, blocks, patterns)
        if not qdesign.verify_moqlc(triple, tol):
            raise AssertionError("constructed triple failed self-verification")
        meta = {
            "property": "moqlc",
            "construction": f"moqlc d1={args.d1} d2={args.d2}",
        }
        return triple, meta
    if kind == "soqls-fill":
        holed = qdesign.embed_classical(fixtures.hsols_4x4())
        if args.lam is not None:
            sols = qdesign.embed_classical(classical.sols_prime_power(4, args.lam))
        else:
            sols = qdesign.embed_classical(fixtures.sols_4())
        if args.unitaries == "quartet16":
            blocks = construct.BlockUnitary(fixtures.quartet16_blocks())
        else:
            blocks = construct.default_block_unitary(4, 4)
        grid = construct.soqls_fill(holed, sols, blocks, tol)
        if not qdesign.verify_soqls(grid, tol):
            raise AssertionError("filled square failed self-verification")
        return grid, {"property": "soqls", "construction": "soqls-fill 4^4"}
    if kind == "weighting":
        holed = [qdesign.embed_classical(h) for h in classical.hmols_unit_holes(args.holes)]
        weights = [
            qdesign.embed_classical(s)
            for s in classical.mols_prime_power(args.m)[:2]
        ]
        if len(weights) < 2:
            raise ValueError("weight order must admit an orthogonal pair")
        pair = construct.weighting(holed, weights, tol)
        if not qdesign.verify_imoqls(pair, tol):
            raise AssertionError("weighted pair failed self-verification")
        meta = {
            "property": "imoqls",
            "construction": f"weighting holes={args.holes} m={args.m}",
        }
        return pair, meta
    if kind == "hsoqls-product":
        holed = qdesign.embed_classical(classical.hsols_unit_holes(args.holes))
        weights = [
            qdesign.embed_classical(s)
            for s in classical.mols_prime_power(args.m)[:2]
        ]
        if len(weights) < 2:
            raise ValueError("weight order must admit an orthogonal pair")
        grid = construct.hsoqls_product(holed, weights, tol)
        if not qdesign.verify_hsoqls(grid, tol):
            raise AssertionError("product square failed self-verification")
        meta = {
            "property": "hsoqls",
            "construction": f"hsoqls-product holes={args.holes} m={args.m}",
        }
        return grid, meta
    if kind == "qoa":
        obj, file_kind, _ = load_design(args.source)
        converted = _to_qoa(obj, file_kind, tol)
        return converted, {"property": "qoa", "construction": f"qoa from {file_kind}"}
    if kind == "state":
        obj, file_kind, _ = load_design(args.source)
        if file_kind != "qoa":
            raise ValueError(f"state construction needs a qoa file, got {file_kind}")
        return qoa.state_from_qoa(obj, tol), {"construction": "state from qoa"}
    raise ValueError(f"unknown construction {kind!r}")


def _to_qoa(obj, file_kind: str, tol: float):
    if file_kind == "qls" and isinstance(obj, list):
        return qoa.moqls_to_qoa(obj, tol)
    if file_kind == "qlc" and isinstance(obj, list):
        return qoa.moqlc_to_qoa(obj, tol)
    if file_kind == "gmoqls":
        return qoa.gmoqls_to_qoa(obj, tol)
    if file_kind == "gmoqlc":
        return qoa.gmoqlc_to_qoa(obj, tol)
    raise ValueError(f"cannot convert kind {file_kind!r} to a quantum orthogonal array")


# ---------------------------------------------------------------------------
# verify


def _infer_property(obj, kind: str, metadata: dict) -> str:
    hinted = metadata.get("property")
    if hinted:
        return hinted
    is_set = isinstance(obj, list)
    if kind == "ls":
        if is_set:
            return "molc" if obj[0].arity == 3 else "mols"
        return "latin"
    if kind == "oa":
        return "oa"
    if kind == "qls":
        return "moqls" if is_set else "qls"
    if kind == "iqls":
        return "imoqls" if is_set else "iqls"
    if kind == "qlc":
        return "moqlc" if is_set else "qlc"
    return {"gmoqls": "gmoqls", "gmoqlc": "gmoqlc", "qoa": "qoa", "state": "uniform"}[kind]


def _run_verify(args, tol: float):
    obj, kind, metadata = load_design(args.file)
    prop = args.prop or ("uniform" if args.uniform else None) or _infer_property(obj, kind, metadata)
    detail = ""
    violation = None
    if prop in ("latin", "sols", "hsols"):
        ok = classical.verify_classical(obj, prop)
    elif prop == "mols":
        ok = classical.verify_classical(obj, "mols-pairwise")
    elif prop == "molc":
        ok = classical.verify_classical(obj, "molc-with-B")
    elif prop == "oa":
        ok = classical.verify_oa(obj)
    elif prop == "qls":
        violation = qdesign.qls_violation(obj, tol)
        ok = violation is None
    elif prop == "qlc":
        violation = qdesign.qlc_violation(obj, tol)
        ok = violation is None
    elif prop == "soqls":
        violation = qdesign.soqls_violation(obj, tol)
        ok = violation is None
    elif prop == "moqls":
        violation = qdesign.moqls_violation(obj, tol)
        ok = violation is None
    elif prop == "moqlc":
        violation = qdesign.moqlc_violation(obj, tol)
        ok = violation is None
    elif prop == "iqls":
        violation = qdesign.iqls_violation(obj, tol)
        ok = violation is None
    elif prop == "imoqls":
        violation = qdesign.imoqls_violation(obj, tol)
        ok = violation is None
    elif prop == "hsoqls":
        violation = qdesign.hsoqls_violation(obj, tol)
        ok = violation is None
    elif prop == "gmoqls":
        violation = qoa.gmoqls_violation(obj, tol)
        ok = violation is None
    elif prop == "gmoqlc":
        violation = qoa.gmoqlc_violation(obj, tol)
        ok = violation is None
    elif prop == "qoa":
        violation = qoa.qoa_violation(obj, tol, args.threads)
        ok = violation is None
        n_sub = math.comb(obj.parties, obj.strength)
        detail = f"{n_sub} subsets of {obj.strength} parties checked"
    elif prop == "uniform":
        if args.k is None:
            raise ValueError("k-uniformity check needs --k")
        violation = qoa.k_uniform_violation(obj, args.k, tol, args.threads)
        ok = violation is None
        n_sub = math.comb(obj.parties, args.k)
        detail = f"{n_sub} subsets of {args.k} parties checked"
    else:
        raise ValueError(f"unknown property {prop!r}")
    return ok, prop, violation, detail


# ---------------------------------------------------------------------------
# example / convert / capability


def _run_example(args):
    if args.list_names:
        names = sorted(set(fixtures.fixture_names()) - {"qls4_7"} | set(_EXAMPLE_PARTS))
        return names, None, None
    if not args.name:
        raise ValueError("example needs a name or --list")
    if args.name in _EXAMPLE_PARTS:
        bundle_name, attr, prop = _EXAMPLE_PARTS[args.name]
        obj = getattr(fixtures.fixture(bundle_name), attr)
        meta = {"property": prop, "source": f"catalog:{args.name}"}
    else:
        obj = fixtures.fixture(args.name)
        if isinstance(obj, tuple):
            obj = list(obj)
        meta = {
            "property": fixtures.fixture_kind(args.name),
            "source": f"catalog:{args.name}",
        }
        notes = fixtures.fixture_notes(args.name)
        if notes:
            meta["notes"] = list(notes)
        if meta["property"] == "qoa":
            meta.pop("property")
    return None, obj, meta


def _run_convert(args, tol: float):
    obj, kind, _ = load_design(args.file)
    if args.target == "qoa":
        return _to_qoa(obj, kind, tol), {"construction": f"converted from {kind}"}
    if args.target == "gmoqls":
        if kind == "qoa":
            return qoa.qoa_to_gmoqls(obj, tol), {"construction": "split from qoa"}
        if kind == "qls" and isinstance(obj, list):
            return qoa.grids_to_generalized(obj), {"construction": "superimposed moqls"}
    if args.target == "gmoqlc":
        if kind == "qoa":
            return qoa.qoa_to_gmoqlc(obj, tol), {"construction": "split from qoa"}
        if kind == "qlc" and isinstance(obj, list):
            return qoa.grids_to_generalized(obj), {"construction": "superimposed moqlc"}
    raise ValueError(f"cannot convert kind {kind!r} to {args.target}")


# display lines: (symbol, field, label, smallest meaningful family size)
_BOUND_LINES = (
    ("m", "mols", "orthogonal squares", 2),
    ("M", "nonclassical_moqls", "non-classical orthogonal quantum squares", 2),
    ("c", "molc_with_planes", "orthogonal cubes with the plane condition", 3),
    ("C", "nonclassical_moqlc", "non-classical orthogonal quantum cubes", 3),
)


def _run_capability(args):
    caps = classical.capability(args.order)
    rows = []
    for letter, field, label, floor in _BOUND_LINES:
        bound = getattr(caps, field)
        rows.append(
            {
                "symbol": letter,
                "description": label,
                "lower_bound": bound.value,
                "exact": bound.exact,
                "rule": bound.rule,
                "nontrivial": bound.value >= floor,
            }
        )
    return caps.order, rows


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    tol = args.tol if args.tol is not None else _tol_default()
    try:
        if args.command == "construct":
            obj, meta = _run_construct(args, tol)
            save_design(args.output, obj, meta)
            if args.as_json:
                print(json.dumps({"ok": True, "output": args.output}))
            else:
                print(f"wrote {args.output}")
            return 0
        if args.command == "verify":
            ok, prop, violation, detail = _run_verify(args, tol)
            if args.as_json:
                record = {"ok": ok, "property": prop, "tol": tol}
                if detail:
                    record["detail"] = detail
                if violation is not None:
                    record["violation"] = {
                        "condition": violation.condition,
                        "where": list(violation.where),
                        "deviation": violation.deviation,
                    }
                print(json.dumps(record))
            else:
                marker = "PASS" if ok else "FAIL"
                line = f"{marker}: {prop} (tol {tol:g})"
                if detail:
                    line += f"; {detail}"
                print(line)
                if violation is not None:
                    print(f"  first violation: {violation}")
            return 0 if ok else 1
        if args.command == "example":
            names, obj, meta = _run_example(args)
            if names is not None:
                print("\n".join(names))
                return 0
            if not args.output:
                raise ValueError("example needs -o to write the design")
            save_design(args.output, obj, meta)
            if args.as_json:
                print(json.dumps({"ok": True, "output": args.output}))
            else:
                print(f"wrote {args.output}")
            return 0
        if args.command == "convert":
            obj, meta = _run_convert(args, tol)
            save_design(args.output, obj, meta)
            if args.as_json:
                print(json.dumps({"ok": True, "output": args.output}))
            else:
                print(f"wrote {args.output}")
            return 0
        if args.command == "capability":
            order, rows = _run_capability(args)
            if args.as_json:
                print(json.dumps({"order": order, "bounds": rows}))
            else:
                print(f"known lower bounds for order {order}")
                for row in rows:
                    relation = "=" if row["exact"] else ">="
                    if not row["nontrivial"]:
                        print(f"  {row['symbol']}({order}): no nontrivial bound "
                              f"({row['description']})")
                    else:
                        print(
                            f"  {row['symbol']}({order}) {relation} {row['lower_bound']}"
                            f"  ({row['description']}; {row['rule']})"
                        )
            return 0
        raise ValueError(f"unknown command {args.command!r}")
    except (DesignFormatError, ValueError, KeyError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
