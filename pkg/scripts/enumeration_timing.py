"""Enumerate M(GF(q)) for small q, compare with q^3 (q^4 - 1) / gcd(2, q - 1)
and time the scan.

    python scripts/enumeration_timing.py --q 2 3 4 5 7 8
"""

import argparse
import time
from dataclasses import dataclass, field

from paigeloops.finite_field import make_field
from paigeloops.paige import enumerate_loop, predicted_order

PRIME_POWERS = {2: (2, 1), 3: (3, 1), 4: (2, 2), 5: (5, 1), 7: (7, 1), 8: (2, 3), 9: (3, 2)}


@dataclass
class TimingConfig:
    qs: list = field(default_factory=lambda: [2, 3, 4, 5])
    max_order: int = 3_000_000


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--q", type=int, nargs="+", default=[2, 3, 4, 5], choices=sorted(PRIME_POWERS))
    ap.add_argument("--max-order", type=int, default=3_000_000)
    args = ap.parse_args()
    cfg = TimingConfig(qs=args.q, max_order=args.max_order)
    print(f"{'q':>3} {'|M(GF(q))|':>12} {'formula':>12} {'seconds':>8}")
    for q in cfg.qs:
        t0 = time.perf_counter()
        loop = enumerate_loop(make_field(*PRIME_POWERS[q]), max_order=cfg.max_order)
        dt = time.perf_counter() - t0
        flag = "" if loop.order == predicted_order(q) else "  MISMATCH"
        print(f"{q:>3} {loop.order:>12} {predicted_order(q):>12} {dt:>8.2f}{flag}")


if __name__ == "__main__":
    main()
