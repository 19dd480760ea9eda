"""Indexed oracle vs brute-force enumeration on small random graphs."""

import argparse
import json
import time

from walkbench.brute import cross_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--graphs", type=int, default=100)
    ap.add_argument("--max-nodes", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--per-template", type=int, default=2)
    args = ap.parse_args()

    t0 = time.perf_counter()
    result = cross_check(args.graphs, args.max_nodes, args.seed, args.per_template)
    elapsed = time.perf_counter() - t0
    print(f"graphs={result.graphs} instances={result.instances} skipped={result.skipped} "
          f"mismatches={len(result.mismatches)} time={elapsed:.1f}s")
    for m in result.mismatches[:5]:
        print(json.dumps(m, sort_keys=True))


if __name__ == "__main__":
    main()
