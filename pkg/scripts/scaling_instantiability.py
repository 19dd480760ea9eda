"""How often every template can be posed on graphs from each preset."""

import argparse
import random
import time
from collections import Counter

from walkbench.benchmark import TEMPLATES, InstantiationError, instantiate
from walkbench.generator import derive_seed, generate_graph, preset


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--presets", nargs="+", default=["paper-100", "paper-150", "paper-200", "paper-500"])
    ap.add_argument("--seeds", type=int, default=100)
    args = ap.parse_args()

    for name in args.presets:
        t0 = time.perf_counter()
        full, failures = 0, Counter()
        for seed in range(args.seeds):
            graph, _ = generate_graph(preset(name, seed=seed))
            rng = random.Random(derive_seed(seed, "questions"))
            ok = True
            for t in TEMPLATES:
                try:
                    instantiate(t, graph, rng)
                except InstantiationError:
                    failures[t.value] += 1
                    ok = False
            full += ok
        print(f"{name}: {full}/{args.seeds} seeds with all templates "
              f"({time.perf_counter() - t0:.1f}s) failures={dict(failures)}")


if __name__ == "__main__":
    main()
