"""Command-line front end.

Every command prints a JSON report (schema "report/1") on stdout, except
``lattice`` which prints the DOT or JSON export.  Exit status: 0 all checks
pass, 1 a check failed, 2 usage/input/cache error, 3 budget or guardrail.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .cache import CacheError, default_cache_path, read_cache, write_cache
from .finite_field import FieldError, GuardrailError, make_field
from .galois_lattice import EmbeddingVerificationError, correspondence_table, embed_paige
from .loop_core import (
    TABLE_LIMIT,
    LoopTable,
    automorphism_search,
    build_table,
    center,
    check_automorphism,
    check_moufang,
    classify_triples,
    find_generators,
    is_simple,
    permutation_order,
)
from .paige import LOOP_ORDER_LIMIT, enumerate_loop, frobenius_map, predicted_order

SCHEMA = "report/1"
AUTOMORPHISM_ORDER_LIMIT = 200
# embed checks run over every pair of the small loop
EMBED_PAIR_LIMIT = 3 * 10**8

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(ValueError):
    pass


class Report:
    def __init__(self, command: str, parameters: dict):
        self.data = {
            "schema": SCHEMA,
            "command": command,
            "version": __version__,
            "parameters": parameters,
            "verdicts": {},
            "results": {},
            "counterexamples": [],
            "timings": {},
            "ok": None,
            "error": None,
        }
        self._t0 = time.perf_counter()

    def timed(self, name: str):
        report = self

        class _Timer:
            def __enter__(self):
                self.t = time.perf_counter()

            def __exit__(self, *exc):
                report.data["timings"][name] = round(time.perf_counter() - self.t, 6)

        return _Timer()

    def verdict(self, name: str, ok: bool):
        self.data["verdicts"][name] = bool(ok)

    def finish(self, error: Exception | None = None, code: int | None = None) -> int:
        self.data["timings"]["total"] = round(time.perf_counter() - self._t0, 6)
        if error is not None:
            self.data["error"] = {"type": type(error).__name__, "message": str(error)}
            self.data["ok"] = False
            return code
        self.data["ok"] = all(self.data["verdicts"].values())
        return EXIT_OK if self.data["ok"] else EXIT_FAIL

    def dumps(self) -> str:
        return json.dumps(self.data, indent=2)


def _tuples(loop, idx) -> list:
    return [int(v) for v in loop.tuples(int(idx))]


def _load(args):
    loop, table = read_cache(args.cache, trust=args.trust_cache)
    if table is None and loop.order <= args.table_limit:
        table = build_table(loop, max_order=args.table_limit)
    return loop, table


def _sampling(args) -> dict:
    if args.mode == "sample":
        if args.seed is None or args.count is None:
            raise UsageError("--mode sample needs --seed and --count")
    return {"mode": args.mode, "seed": args.seed, "count": args.count}


# ---------------------------------------------------------------------------
# commands


def cmd_enumerate(args, rep: Report) -> None:
    f = make_field(args.p, args.n)
    if args.p == 0:
        raise UsageError("enumeration needs a prime p")
    with rep.timed("enumerate"):
        loop = enumerate_loop(f, max_order=args.max_order)
    table = None
    if args.table:
        with rep.timed("table"):
            table = build_table(loop, max_order=args.table_limit)
    out = Path(args.out) if args.out else default_cache_path(args.p, args.n)
    with rep.timed("write"):
        write_cache(out, loop, table)
    expected = predicted_order(f.order)
    rep.data["results"].update(order=loop.order, predicted_order=expected, cache=str(out),
                               table=table is not None)
    rep.verdict("order_matches_prediction", loop.order == expected)


def cmd_verify(args, rep: Report) -> None:
    rep.data["parameters"].update(_sampling(args))
    with rep.timed("load"):
        loop, table = _load(args)
    t = table if table is not None else loop
    rep.data["results"]["order"] = loop.order
    rep.data["results"]["backend"] = "table" if table is not None else "zorn"
    suites = ["moufang", "simple", "center"] if args.suite == "all" else [args.suite]
    gens = None
    if table is None:
        gens = find_generators(loop, seed=0)
        rep.data["results"]["generators"] = [_tuples(loop, g) for g in gens]

    if "moufang" in suites:
        with rep.timed("moufang"):
            m = check_moufang(t, mode=args.mode, count=args.count, seed=args.seed)
        rep.data["results"]["moufang_checked"] = m.checked
        for name, ok in m.passed.items():
            rep.verdict(f"moufang: {name}", ok)
        for name, (x, y, z) in m.counterexamples.items():
            rep.data["counterexamples"].append(
                {"check": f"moufang: {name}", "elements": [_tuples(loop, v) for v in (x, y, z)]})
    if "simple" in suites:
        with rep.timed("simple"):
            ok = is_simple(t, translators=gens)
        rep.verdict("simple", ok)
    if "center" in suites:
        with rep.timed("center"):
            z = center(t, generators=gens)
        rep.data["results"]["center"] = [_tuples(loop, v) for v in z.indices]
        rep.verdict("center_trivial", z.indices == (0,))
        if z.indices != (0,):
            rep.data["counterexamples"].append(
                {"check": "center_trivial", "elements": [_tuples(loop, v) for v in z.indices if v]})


def cmd_generators(args, rep: Report) -> None:
    rep.data["parameters"].update(_sampling(args))
    with rep.timed("load"):
        loop, table = _load(args)
    t = table if table is not None else loop
    with rep.timed("scan"):
        r = classify_triples(t, mode=args.mode, count=args.count, seed=args.seed,
                             max_examples=args.max_examples, method="translations")
    prime = loop.field.n == 1
    rep.data["results"].update(
        order=loop.order,
        checked=r.checked,
        associating=r.associating,
        nonassociating_generating=r.nonassoc_generating,
        nonassociating_nongenerating=r.nonassoc_nongenerating,
        prediction_applies=prime,
    )
    for x, y, z in r.nongenerating_examples:
        rep.data["counterexamples"].append(
            {"check": "nonassociating triple generates", "elements": [_tuples(loop, v) for v in (x, y, z)]})
    if prime:
        rep.verdict("nonassociating triples generate", r.nonassoc_nongenerating == 0)


def cmd_automorphisms(args, rep: Report) -> None:
    with rep.timed("load"):
        loop, table = read_cache(args.cache, trust=args.trust_cache)
    if loop.order > AUTOMORPHISM_ORDER_LIMIT:
        raise GuardrailError(f"automorphism search needs order <= {AUTOMORPHISM_ORDER_LIMIT}, got {loop.order}")
    if table is None:
        table = build_table(loop)
    with rep.timed("search"):
        r = automorphism_search(table, budget=args.budget)
    rep.data["results"].update(order=loop.order, count=r.count, complete=r.complete, nodes=r.nodes,
                               base=[_tuples(loop, g) for g in r.base], pruned=dict(r.pruned))
    if not r.complete:
        raise GuardrailError(f"node budget {args.budget} exhausted after {r.count} automorphisms")
    rep.verdict("search complete", True)


def cmd_frobenius(args, rep: Report) -> None:
    with rep.timed("load"):
        loop, table = _load(args)
    perm = frobenius_map(loop, args.k)
    exhaustive = args.exhaustive or table is not None
    t = table if table is not None else loop
    with rep.timed("check"):
        if exhaustive:
            ok = check_automorphism(t, perm)
        else:
            gens = find_generators(loop, seed=0)
            rep.data["results"]["generators"] = [_tuples(loop, g) for g in gens]
            ok = check_automorphism(t, perm, generators=gens)
    rep.data["results"].update(order=loop.order, k=args.k, permutation_order=permutation_order(perm),
                               method="exhaustive" if exhaustive else "generators")
    rep.verdict("automorphism", ok)


def cmd_lattice(args) -> int:
    try:
        tower = correspondence_table(args.p, args.n)
    except FieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GuardrailError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    checks = []
    if args.embed_check:
        for d, e in tower.covers():
            small, big = make_field(args.p, d), make_field(args.p, e)
            pairs = predicted_order(small.order) ** 2
            entry = {"from": d, "to": e, "pairs": pairs}
            if pairs > EMBED_PAIR_LIMIT or predicted_order(small.order) > LOOP_ORDER_LIMIT:
                entry["status"] = "skipped"
            else:
                try:
                    embed_paige(small, big)
                    entry["status"] = "verified"
                except (GuardrailError, EmbeddingVerificationError) as exc:
                    entry["status"] = "skipped" if isinstance(exc, GuardrailError) else "failed"
                    entry["message"] = str(exc)
            checks.append(entry)
    if args.format == "json":
        doc = tower.to_dict()
        if args.embed_check:
            doc["embed_checks"] = checks
        text = json.dumps(doc, indent=2) + "\n"
    else:
        text = tower.to_dot()
        if checks:
            notes = "".join(f"// embed {c['from']} -> {c['to']}: {c['status']}\n" for c in checks)
            text = notes + text
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_FAIL if any(c["status"] == "failed" for c in checks) else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="paige", description="Paige loops over finite fields")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def cache_args(sp):
        sp.add_argument("--cache", required=True, help="cache file written by 'enumerate'")
        sp.add_argument("--trust-cache", action="store_true", help="skip re-verification on load")
        sp.add_argument("--table-limit", type=int, default=TABLE_LIMIT,
                        help="build a dense Cayley table up to this order")
        sp.add_argument("--report", help="also write the JSON report here")

    def sample_args(sp):
        sp.add_argument("--mode", choices=["exhaustive", "sample"], default="exhaustive")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--count", type=int)

    sp = sub.add_parser("enumerate", help="enumerate M(GF(p^n)) and write a cache")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--out", help="cache path (default: $PAIGE_CACHE_DIR/paige_<p>_<n>.bin)")
    sp.add_argument("--max-order", type=int, default=LOOP_ORDER_LIMIT)
    sp.add_argument("--table", action="store_true", help="store the Cayley table too")
    sp.add_argument("--table-limit", type=int, default=TABLE_LIMIT)
    sp.add_argument("--report")

    sp = sub.add_parser("verify", help="Moufang identities, simplicity, center")
    cache_args(sp)
    sp.add_argument("--suite", choices=["moufang", "simple", "center", "all"], default="all")
    sample_args(sp)

    sp = sub.add_parser("generators", help="classify triples by associativity and generation")
    cache_args(sp)
    sample_args(sp)
    sp.add_argument("--max-examples", type=int, default=20)

    sp = sub.add_parser("automorphisms", help="count automorphisms (order <= 200)")
    cache_args(sp)
    sp.add_argument("--budget", type=int, help="node budget for the search")

    sp = sub.add_parser("frobenius", help="check the Frobenius map a -> a^(p^k)")
    cache_args(sp)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--exhaustive", action="store_true",
                    help="check every product even without a table")

    sp = sub.add_parser("lattice", help="export the subfield / Galois subgroup lattice")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--format", choices=["dot", "json"], default="dot")
    sp.add_argument("--embed-check", action="store_true",
                    help="verify M(GF(p^d)) -> M(GF(p^e)) for every covering pair")
    sp.add_argument("--out")
    return ap


COMMANDS = {
    "enumerate": cmd_enumerate,
    "verify": cmd_verify,
    "generators": cmd_generators,
    "automorphisms": cmd_automorphisms,
    "frobenius": cmd_frobenius,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "lattice":
        return cmd_lattice(args)
    params = {k: v for k, v in vars(args).items() if k not in ("command", "report")}
    rep = Report(args.command, params)
    try:
        COMMANDS[args.command](args, rep)
        code = rep.finish()
    except (CacheError, FieldError, UsageError, ValueError, OSError) as exc:
        code = rep.finish(exc, EXIT_USAGE)
    except GuardrailError as exc:
        code = rep.finish(exc, EXIT_BUDGET)
    text = rep.dumps()
    print(text)
    if args.report:
        Path(args.report).write_text(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
