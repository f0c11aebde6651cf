"""Recover dead channels by rank-2 completion of the lifted matrix.

Two stories:
1. no reverberation -- completion is numerically exact, the dead channels
   come back to machine precision;
2. heavy-tailed reverberation -- the l2 fit is dragged by outliers while the
   l1 fit (solved by iteratively reweighted least squares) stays close.
"""

import numpy as np

from hankelmc import (FailureMode, PNorm, ScenarioConfig, SolverOptions,
                      complete, nrmse, sap_baseline, simulate_scenario)


def scenario(ssr_db, seed):
    return simulate_scenario(ScenarioConfig(
        n_sensors=20, n_snapshots=100, n_sources=2, dir_angles=(-20.0, 30.0),
        ssr_db=ssr_db, failure_fraction=0.3,
        failure_mode=FailureMode.RANDOM_CHANNELS, k_dof=0.1, rng_seed=seed))


# --- noiseless: exact recovery of fully dead channels
meas = scenario(float("inf"), seed=1)
opts = SolverOptions(p=PNorm.L2, rank=2, outer_iters=50, rng_seed=0)
est = complete(meas, opts)
print(f"noiseless, 6 dead channels: nrmse = {nrmse(est, meas.clean):.2e}")

failed = np.flatnonzero(meas.mask[0] == 0)
col_err = np.linalg.norm(est[failed, :] - meas.clean[failed, :])
col_ref = np.linalg.norm(meas.clean[failed, :])
print(f"error restricted to the dead channels: {col_err / col_ref:.2e}")

# --- reverberant: l1 shrugs off the outliers, l2 does not
print("\nwith reverberation at 10 dB SSR (median over 20 trials):")
errs = {"L1": [], "L2": [], "SAP": []}
for t in range(20):
    meas = scenario(10.0, seed=100 + t)
    for p in (PNorm.L1, PNorm.L2):
        e = complete(meas, SolverOptions(p=p, rank=2, outer_iters=10, rng_seed=t))
        errs[p.value].append(nrmse(e, meas.clean))
    errs["SAP"].append(nrmse(sap_baseline(meas, rank=2, iters=10), meas.clean))
for name, vals in errs.items():
    print(f"  {name:>3}: median nrmse = {np.median(vals):.4f}")
print("-> l1 is an order of magnitude closer; the SVD-projection baseline "
      "tracks the l2 fit")
