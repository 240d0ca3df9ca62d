"""Census of triples in M(GF(q)): associating, nonassociating and generating,
nonassociating but confined to a proper subloop.

For each nonassociating triple that fails to generate, the order of the
subloop it does generate is tallied.

    python scripts/triple_census.py --q 2 --mode exhaustive
    python scripts/triple_census.py --q 3 5 --count 2000 --seed 1
"""

import argparse
import json
import time
from collections import Counter
from dataclasses import asdict, dataclass, field

import numpy as np

from paigeloops.loop_core import build_table, classify_triples, subloop_closure
from paigeloops.paige import paige_loop

PRIME_POWERS = {2: (2, 1), 3: (3, 1), 4: (2, 2), 5: (5, 1), 7: (7, 1)}


@dataclass
class CensusConfig:
    qs: list = field(default_factory=lambda: [2, 3])
    mode: str = "sample"
    count: int = 2000
    seed: int = 0
    max_examples: int = 200


def census(q: int, cfg: CensusConfig) -> dict:
    loop = paige_loop(*PRIME_POWERS[q])
    t = build_table(loop) if loop.order <= 2000 else loop
    t0 = time.perf_counter()
    r = classify_triples(t, mode=cfg.mode, count=cfg.count, seed=cfg.seed,
                         max_examples=cfg.max_examples, method="translations")
    sizes = Counter(subloop_closure(t, ex, method="translations").size for ex in r.nongenerating_examples)
    return {
        "q": q,
        "order": loop.order,
        "checked": r.checked,
        "associating": r.associating,
        "nonassociating_generating": r.nonassoc_generating,
        "nonassociating_nongenerating": r.nonassoc_nongenerating,
        "proper_subloop_orders": dict(sorted(sizes.items())),
        "example": [loop.tuples(i).tolist() for i in r.nongenerating_examples[0]] if r.nongenerating_examples else None,
        "seconds": round(time.perf_counter() - t0, 2),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--q", type=int, nargs="+", default=[2, 3], choices=sorted(PRIME_POWERS))
    ap.add_argument("--mode", choices=["exhaustive", "sample"], default="sample")
    ap.add_argument("--count", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = CensusConfig(qs=args.q, mode=args.mode, count=args.count, seed=args.seed)
    out = {"config": asdict(cfg), "results": [census(q, cfg) for q in cfg.qs]}
    print(json.dumps(out, indent=2, default=lambda o: o.tolist() if isinstance(o, np.ndarray) else str(o)))


if __name__ == "__main__":
    main()
