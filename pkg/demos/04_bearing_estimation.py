"""Bearing estimation before and after completion.

The conventional beamformer scans steering directions against the sample
covariance.  On raw data with dead channels and reverberation spikes the
spectrum grows false peaks; on the completed matrix the two sources stand
alone.
"""

import numpy as np

from hankelmc import (FailureMode, PNorm, ScenarioConfig, SolverOptions,
                      bartlett_spectrum, complete, pick_peaks, rmse_theta,
                      sample_covariance, simulate_scenario)

truth = (-8.0, 4.0)
config = ScenarioConfig(
    n_sensors=20, n_snapshots=100, n_sources=2, dir_angles=truth,
    ssr_db=5.0, failure_fraction=0.3,
    failure_mode=FailureMode.CONTIGUOUS_CHANNELS, k_dof=0.1, rng_seed=3)
meas = simulate_scenario(config)

spec_raw = bartlett_spectrum(sample_covariance(meas.x.T))
est = complete(meas, SolverOptions(p=PNorm.L1, rank=2, outer_iters=10, rng_seed=3))
spec_l1 = bartlett_spectrum(sample_covariance(est))

raw_peaks = pick_peaks(spec_raw, 2)
l1_peaks = pick_peaks(spec_l1, 2)
print(f"true bearings: {truth}")
print(f"raw data peaks : {tuple(round(a, 2) for a in raw_peaks.angles)}")
print(f"completed peaks: {tuple(round(a, 2) for a in l1_peaks.angles)}")

# how much of the raw spectrum sits above -10 dB away from the sources?
strong = spec_raw.values > 0.1
far = np.ones_like(spec_raw.angles, dtype=bool)
for t in truth:
    far &= np.abs(spec_raw.angles - t) > 5.7
print(f"raw spectrum above -10 dB away from both sources: "
      f"{np.count_nonzero(strong & far)} grid points")

# error statistics over repeated trials at 10 dB
raw_est, l1_est = [], []
for t in range(30):
    m = simulate_scenario(ScenarioConfig(
        n_sensors=20, n_snapshots=100, n_sources=2, dir_angles=truth,
        ssr_db=10.0, failure_fraction=0.3,
        failure_mode=FailureMode.CONTIGUOUS_CHANNELS, k_dof=0.1,
        rng_seed=500 + t))
    raw_est.append(pick_peaks(bartlett_spectrum(sample_covariance(m.x.T)), 2))
    e = complete(m, SolverOptions(p=PNorm.L1, rank=2, outer_iters=10, rng_seed=t))
    l1_est.append(pick_peaks(bartlett_spectrum(sample_covariance(e)), 2))
print(f"\nbearing RMSE over 30 trials: raw {rmse_theta(raw_est, truth):.3f} deg, "
      f"completed {rmse_theta(l1_est, truth):.3f} deg")
