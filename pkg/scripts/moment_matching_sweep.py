"""Fit random families of every variant and tabulate outcomes.

    python3 scripts/moment_matching_sweep.py --specs 50 --rows 32
"""

import argparse
import collections
import time

import numpy as np

from momentmatch import specimens
from momentmatch.core import Variant
from momentmatch.learning import FitOptions, Status, fit


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--specs", type=int, default=50)
    ap.add_argument("--rows", type=int, default=32)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-iters", type=int, default=5000)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    opts = FitOptions(max_iters=args.max_iters)
    print(f"{'variant':<20}{'conv':>6}{'maxit':>7}{'div':>6}{'worst resid':>14}{'med iters':>11}{'secs':>7}")
    for variant in Variant:
        counts = collections.Counter()
        worst, iters = 0.0, []
        t0 = time.perf_counter()
        for _ in range(args.specs):
            spec = specimens.random_family(rng, variant)
            data = specimens.random_dataset(rng, spec, args.rows)
            res = fit(spec, data, opts)
            counts[res.status] += 1
            if res.status is Status.CONVERGED:
                worst = max(worst, res.mm_residual_inf)
                iters.append(res.iterations)
        secs = time.perf_counter() - t0
        print(
            f"{variant.value:<20}{counts[Status.CONVERGED]:>6}{counts[Status.MAX_ITERS]:>7}"
            f"{counts[Status.DIVERGING]:>6}{worst:>14.2e}{int(np.median(iters or [0])):>11}{secs:>7.2f}"
        )


if __name__ == "__main__":
    main()
