"""Count automorphisms of M(GF(2)) by backtracking and check every one found.

    python scripts/count_automorphisms.py [--collect]
"""

import argparse
import time
from dataclasses import dataclass

from paigeloops.loop_core import automorphism_search, build_table, check_automorphism, permutation_order
from paigeloops.paige import paige_loop


@dataclass
class SearchConfig:
    collect: bool = False
    budget: int | None = None


def run(cfg: SearchConfig):
    t = build_table(paige_loop(2))
    t0 = time.perf_counter()
    r = automorphism_search(t, collect=cfg.collect, budget=cfg.budget)
    dt = time.perf_counter() - t0
    print(f"|Aut M(GF(2))| = {r.count}  complete={r.complete}  nodes={r.nodes}  {dt:.1f}s")
    print(f"base {r.base}, pruned {dict(r.pruned)}")
    if cfg.collect:
        orders = {}
        for p in r.permutations:
            assert check_automorphism(t, p)
            k = permutation_order(p)
            orders[k] = orders.get(k, 0) + 1
        print("element orders in Aut:", dict(sorted(orders.items())))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--collect", action="store_true", help="keep and verify every automorphism")
    ap.add_argument("--budget", type=int)
    args = ap.parse_args()
    run(SearchConfig(collect=args.collect, budget=args.budget))


if __name__ == "__main__":
    main()
