"""Bearing estimation from (recovered) array data.

The spatial spectrum is the conventional beamformer power a(theta)^H R a /
N^2 scanned over a uniform angle grid and max-normalized, with R the sample
covariance of the N x M data matrix.  Peaks are refined by 3-point parabolic
interpolation so the bearing error is not quantized to the grid step.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .simulate import build_steering_matrix

__all__ = [
    "SpatialSpectrum",
    "DoaEstimate",
    "angle_grid",
    "sample_covariance",
    "bartlett_spectrum",
    "pick_peaks",
    "rmse_theta",
]


def angle_grid(step: float = 0.1) -> np.ndarray:
    """Uniform bearing grid spanning the open interval (-90, 90) degrees."""
    if step <= 0:
        raise ValidationError(f"grid step {step} must be positive")
    k = int(round(90.0 / step))
    return step * np.arange(-k + 1, k)


@dataclass(frozen=True)
class SpatialSpectrum:
    angles: np.ndarray  # degrees, ascending
    values: np.ndarray  # nonnegative, max-normalized to 1

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("angle_deg,power\n")
            for a, v in zip(self.angles, self.values):
                fh.write(f"{a:.17g},{v:.17g}\n")


@dataclass(frozen=True)
class DoaEstimate:
    """Estimated bearings in degrees, sorted ascending.

    ``padded`` flags estimates where fewer local maxima than sources were
    found and the remainder was filled with the largest leftover grid values.
    """

    angles: tuple
    padded: bool = False


def sample_covariance(d: np.ndarray) -> np.ndarray:
    """(1/M) D D^H for an N x M data matrix; Hermitian PSD by construction."""
    d = np.asarray(d)
    if d.ndim != 2 or d.shape[1] < 1:
        raise ValidationError(f"expected an N x M matrix, got shape {d.shape}")
    return d @ d.conj().T / d.shape[1]


def bartlett_spectrum(cov: np.ndarray, grid: np.ndarray = None) -> SpatialSpectrum:
    """Conventional beamformer spectrum over a bearing grid, max-normalized."""
    cov = np.asarray(cov)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValidationError(f"covariance must be square, got {cov.shape}")
    if grid is None:
        grid = angle_grid()
    a = build_steering_matrix(grid, cov.shape[0])      # N x G
    power = np.real(np.einsum("ng,nh,hg->g", a.conj(), cov, a,
                              optimize=True)) / cov.shape[0] ** 2
    peak = power.max()
    if peak <= 0.0:
        raise ValidationError("spectrum undefined for an all-zero covariance")
    return SpatialSpectrum(angles=np.asarray(grid, dtype=float),
                           values=np.maximum(power, 0.0) / peak)


def _parabolic_refine(angles, values, i):
    """Vertex of the parabola through grid points i-1, i, i+1."""
    y0, y1, y2 = values[i - 1], values[i], values[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0.0:  # flat or degenerate triple: keep the grid point
        return angles[i]
    offset = 0.5 * (y0 - y2) / denom
    return angles[i] + offset * (angles[i] - angles[i - 1])


def pick_peaks(spectrum: SpatialSpectrum, n_sources: int) -> DoaEstimate:
    """The n_sources largest local maxima, parabolically refined.

    A local maximum is a grid point strictly above both neighbors.  If the
    spectrum has fewer local maxima than sources, the remainder is padded
    with the largest leftover grid values and the estimate is flagged.
    """
    if n_sources < 1:
        raise ValidationError(f"n_sources={n_sources} must be >= 1")
    v = np.asarray(spectrum.values)
    ang = np.asarray(spectrum.angles)
    if v.size == 0:
        raise ValidationError("empty spectrum")
    interior = np.arange(1, v.size - 1)
    # allow a tie on one side so a vertex exactly between two grid points
    # (equal-valued pair) still counts as a single peak
    ge = (v[interior] >= v[interior - 1]) & (v[interior] >= v[interior + 1])
    gt = (v[interior] > v[interior - 1]) | (v[interior] > v[interior + 1])
    candidates = interior[ge & gt]
    peaks = []
    for i in candidates[np.argsort(v[candidates])[::-1]]:
        if len(peaks) == n_sources:
            break
        if any(abs(i - j) <= 1 for j in peaks):  # other half of a plateau pair
            continue
        peaks.append(int(i))
    estimates = [_parabolic_refine(ang, v, i) for i in peaks]
    padded = len(estimates) < n_sources
    if padded:
        taken = set(peaks)
        order = np.argsort(v)[::-1]
        for i in order:
            if len(estimates) == n_sources:
                break
            if i not in taken:
                taken.add(i)
                estimates.append(float(ang[i]))
    return DoaEstimate(angles=tuple(sorted(estimates)), padded=padded)


def rmse_theta(estimates, truth) -> float:
    """Root-mean-square bearing error over trials, in degrees.

    Estimates and truth are matched by sorted order (adequate for
    well-separated sources); the mean runs over all trials and sources:
    sqrt( sum_trials sum_sources (est - true)^2 / (n_trials * r) ).
    """
    truth = np.sort(np.asarray(truth, dtype=float))
    r = truth.size
    if len(estimates) == 0:
        raise ValidationError("no estimates given")
    total = 0.0
    for est in estimates:
        angles = est.angles if isinstance(est, DoaEstimate) else tuple(est)
        if len(angles) != r:
            raise ValidationError(
                f"estimate has {len(angles)} angles, truth has {r}")
        total += float(np.sum((np.sort(np.asarray(angles)) - truth) ** 2))
    return float(np.sqrt(total / (len(estimates) * r)))
