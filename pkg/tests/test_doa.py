import numpy as np
import pytest

from hankelmc.doa import (DoaEstimate, SpatialSpectrum, angle_grid,
                          bartlett_spectrum, pick_peaks, rmse_theta,
                          sample_covariance)
from hankelmc.errors import ValidationError
from hankelmc.hankel import lift, lift_mask
from hankelmc.simulate import (FailureMode, ScenarioConfig,
                               build_steering_matrix, sample_signal,
                               simulate_scenario)
from hankelmc.solver import PNorm, SolverOptions, alternate_minimize


def test_angle_grid_spans_open_interval():
    g = angle_grid(0.1)
    assert g[0] == pytest.approx(-89.9)
    assert g[-1] == pytest.approx(89.9)
    assert np.all(np.diff(g) > 0)
    assert -90.0 not in g and 90.0 not in g


# ---------------------------------------------------------------- covariance

def test_covariance_zero_matrix():
    np.testing.assert_array_equal(sample_covariance(np.zeros((4, 6))),
                                  np.zeros((4, 4)))


def test_covariance_single_column_outer_product():
    rng = np.random.default_rng(0)
    d = rng.standard_normal((5, 1)) + 1j * rng.standard_normal((5, 1))
    cov = sample_covariance(d)
    np.testing.assert_allclose(cov, np.outer(d[:, 0], d[:, 0].conj()), atol=1e-14)
    assert np.linalg.matrix_rank(cov) == 1


def test_covariance_large_sample_limit():
    rng = np.random.default_rng(1)
    a = build_steering_matrix([-20.0, 30.0], 10)
    s = sample_signal(2, 10 ** 4, rng)
    cov = sample_covariance(a @ s)
    ref = a @ a.conj().T
    assert np.linalg.norm(cov - ref) < 0.05 * np.linalg.norm(ref)


def test_covariance_hermitian_psd():
    rng = np.random.default_rng(2)
    d = rng.standard_normal((6, 30)) + 1j * rng.standard_normal((6, 30))
    cov = sample_covariance(d)
    np.testing.assert_allclose(cov, cov.conj().T, atol=1e-13)
    assert np.min(np.linalg.eigvalsh(cov)) >= -1e-12


# ---------------------------------------------------------------- spectrum

def test_spectrum_peak_at_matched_steering():
    a = build_steering_matrix([10.0], 20)[:, 0]
    spec = bartlett_spectrum(np.outer(a, a.conj()))
    top = spec.angles[np.argmax(spec.values)]
    assert abs(top - 10.0) <= 0.1
    assert spec.values.max() == 1.0


def test_spectrum_flat_for_identity_covariance():
    spec = bartlett_spectrum(np.eye(8))
    np.testing.assert_allclose(spec.values, np.ones_like(spec.values), atol=1e-12)


def test_spectrum_first_null_beamwidth():
    # N=20 half-wavelength ULA: first nulls at +/- arcsin(2/N)
    n = 20
    a = build_steering_matrix([0.0], n)[:, 0]
    spec = bartlett_spectrum(np.outer(a, a.conj()), grid=angle_grid(0.01))
    null = np.degrees(np.arcsin(2.0 / n))
    right = spec.angles[(spec.angles > 0) & (spec.angles < 2 * null)]
    vals = spec.values[(spec.angles > 0) & (spec.angles < 2 * null)]
    measured = right[np.argmin(vals)]
    assert abs(measured - null) < 0.02
    assert abs(2 * null - 11.478) < 0.01  # ~11.5 degrees null-to-null


def test_spectrum_scaling_invariance_and_symmetry():
    rng = np.random.default_rng(3)
    d = rng.standard_normal((8, 40))  # real data -> symmetric spectrum
    cov = sample_covariance(d)
    s1 = bartlett_spectrum(cov)
    s2 = bartlett_spectrum(173.0 * cov)
    np.testing.assert_allclose(s1.values, s2.values, atol=1e-12)
    np.testing.assert_allclose(s1.values, s1.values[::-1], atol=1e-10)
    p1, p2 = pick_peaks(s1, 2), pick_peaks(s2, 2)
    np.testing.assert_allclose(p1.angles, p2.angles, atol=1e-9)
    assert p1.padded == p2.padded


def test_spectrum_rejects_zero_covariance():
    with pytest.raises(ValidationError):
        bartlett_spectrum(np.zeros((4, 4)))


# ---------------------------------------------------------------- peaks

def test_pick_single_peak():
    a = build_steering_matrix([10.0], 20)[:, 0]
    spec = bartlett_spectrum(np.outer(a, a.conj()))
    est = pick_peaks(spec, 1)
    assert abs(est.angles[0] - 10.0) <= 0.1
    assert not est.padded


def test_pick_two_peaks_sorted():
    a = build_steering_matrix([-30.0, 30.0], 20)
    cov = a @ a.conj().T
    est = pick_peaks(bartlett_spectrum(cov), 2)
    assert len(est.angles) == 2
    assert abs(est.angles[0] + 30.0) < 0.2 and abs(est.angles[1] - 30.0) < 0.2
    assert est.angles[0] < est.angles[1]


def test_parabolic_refinement_exact_on_quadratic():
    grid = angle_grid(0.1)
    vertex = 10.05
    values = 1.0 - 0.001 * (grid - vertex) ** 2
    spec = SpatialSpectrum(angles=grid, values=values)
    est = pick_peaks(spec, 1)
    assert abs(est.angles[0] - vertex) < 1e-6


def test_pick_peaks_pads_when_spectrum_flat():
    grid = angle_grid(1.0)
    spec = SpatialSpectrum(angles=grid, values=np.ones_like(grid))
    est = pick_peaks(spec, 2)
    assert est.padded
    assert len(est.angles) == 2


def test_pick_peaks_rejects_empty():
    with pytest.raises(ValidationError):
        pick_peaks(SpatialSpectrum(np.array([]), np.array([])), 1)


# ---------------------------------------------------------------- rmse

def test_rmse_zero_for_exact_estimates():
    ests = [DoaEstimate((-20.0, 30.0))] * 100
    assert rmse_theta(ests, [-20.0, 30.0]) == 0.0


def test_rmse_constant_offset():
    ests = [DoaEstimate((11.0,))] * 100
    assert rmse_theta(ests, [10.0]) == pytest.approx(1.0)


def test_rmse_half_trials_off_by_two_degrees():
    perfect = [DoaEstimate((-20.0, 30.0))] * 50
    off = [DoaEstimate((-18.0, 30.0))] * 50
    assert rmse_theta(perfect + off, [-20.0, 30.0]) == pytest.approx(1.0)


def test_rmse_rejects_length_mismatch():
    with pytest.raises(ValidationError):
        rmse_theta([DoaEstimate((1.0,))], [0.0, 5.0])


# ---------------------------------------------------------------- end to end

def test_recovered_data_peaks_near_truth():
    # l1 completion at 10 dB with 30% failure: both peaks within 1 degree of
    # the true bearings in at least 95 of 100 trials
    hits = 0
    trials = 100
    for t in range(trials):
        cfg = ScenarioConfig(20, 100, 2, (-20.0, 30.0), 10.0, 0.3,
                             FailureMode.RANDOM_CHANNELS, 0.1, 5000 + t)
        meas = simulate_scenario(cfg)
        lifted = lift(meas.x, 10)
        mask = lift_mask(meas.mask, 10)
        opts = SolverOptions(p=PNorm.L1, rank=2, outer_iters=10, rng_seed=t)
        factors, _ = alternate_minimize(lifted.z, mask, opts)
        from hankelmc.hankel import LiftedMatrix, unlift
        est = unlift(LiftedMatrix(factors.product, mask.shape)).T
        doa = pick_peaks(bartlett_spectrum(sample_covariance(est)), 2)
        err = np.abs(np.asarray(doa.angles) - np.array([-20.0, 30.0]))
        hits += bool(np.all(err < 1.0))
    assert hits >= 95


def test_spectrum_csv_export(tmp_path):
    a = build_steering_matrix([0.0], 6)[:, 0]
    spec = bartlett_spectrum(np.outer(a, a.conj()), grid=angle_grid(30.0))
    path = tmp_path / "spec.csv"
    spec.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "angle_deg,power"
    assert len(lines) == 1 + len(spec.angles)
