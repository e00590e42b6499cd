"""Two-component mixture on [1, 1, 0, 0], where zero init is a stationary point.

The gradient vanishes at theta = 0 because both hidden states look alike, so
a zero-initialised fit stops immediately. For this dataset that point already
matches the empirical moments. Random init breaks the symmetry and the fit
lands elsewhere on the same flat optimal set (equal log-likelihood).
"""

import numpy as np

from momentmatch import specimens
from momentmatch.learning import FitOptions, Init, fit, moment_report
from momentmatch.specimens import rows


def show(label, res):
    theta = np.array2string(res.theta_hat, precision=4, suppress_small=True)
    print(f"{label:<14} {res.status.value:<10} iters={res.iterations:<5} "
          f"loglik={res.loglik_final:.6f} resid={res.mm_residual_inf:.1e} theta={theta}")


def main():
    spec = specimens.mixture()
    data = rows(spec, 1, 1, 0, 0)
    rep = moment_report(spec, data, np.zeros(spec.stat_dim))
    print("at theta=0  data_side", rep.data_side, " model_side", rep.model_side)

    show("zeros", fit(spec, data, FitOptions(init=Init.zeros())))
    for seed in (42, 0, 1, 2):
        show(f"random/{seed}", fit(spec, data, FitOptions(init=Init.random(0.01, seed))))


if __name__ == "__main__":
    main()
