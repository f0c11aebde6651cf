"""hankelmc: low-rank recovery of sonar array data with failed channels.

A sensor array observing a few narrowband sources produces a low-rank data
matrix.  Failed channels delete whole columns, which ordinary matrix
completion cannot restore; a block-Hankel rearrangement scatters the missing
entries so a rank-r factorization can.  Heavy-tailed reverberation is
handled by minimizing the l1 norm of the observed residuals instead of the
usual least squares.

Layers:

* :mod:`hankelmc.simulate`    synthetic scenarios (steering, sources,
  chi-square-envelope reverberation, failure masks)
* :mod:`hankelmc.hankel`      block-Hankel lift / weighted inverse / masks
* :mod:`hankelmc.solver`      alternating lp completion and an SVD-projection
  baseline
* :mod:`hankelmc.doa`         beamforming spectra and bearing estimates
* :mod:`hankelmc.experiments` seeded Monte-Carlo experiment harness
* :mod:`hankelmc.cli`         command-line front end (``hankelmc --help``)
"""

from .doa import (DoaEstimate, SpatialSpectrum, angle_grid, bartlett_spectrum,
                  pick_peaks, rmse_theta, sample_covariance)
from .errors import StructuralMaskError, ValidationError
from .experiments import (Algorithm, GridSpec, RecoveryMetric, aggregate_nrmse,
                          default_doa_grid, default_doa_scenario,
                          default_phase_grid, default_scenario, nrmse,
                          run_beam_pattern, run_convergence, run_doa_grid,
                          run_phase_transition)
from .hankel import (HankelShape, LiftedMask, LiftedMatrix,
                     antidiagonal_weights, default_n1, lift, lift_mask, unlift)
from .simulate import (FailureMode, MeasurementMatrix, ScenarioConfig,
                       assemble_measurement, build_steering_matrix,
                       sample_failure_mask, sample_reverberation,
                       sample_signal, scale_to_ssr, simulate_scenario)
from .solver import (FactorPair, PNorm, ResidualReport, SolverOptions,
                     alternate_minimize, complete, embed_real, sap_baseline,
                     sap_iterates, solve_l1_subproblem, solve_ls_subproblem,
                     update_U, update_V)

__version__ = "0.1.0"
