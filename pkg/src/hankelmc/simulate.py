"""Synthetic sonar-array scenarios: plane-wave signals on a half-wavelength
uniform line array, heavy-tailed reverberation, and failed-channel masks.

The clean array signal is A(theta) @ S with A the N x r steering matrix and
S an r x M matrix of i.i.d. unit-variance circular complex Gaussian source
samples.  Reverberation is modeled entrywise as envelope * exp(j*phase) with
a chi-square-form envelope (Gamma with shape n/2 and scale 2, heavy-tailed
for small n) and phase uniform on (0, 2*pi).  Channel failure zeroes entire
columns of the M x N data matrix X = (A@S + R)^T.

All generators are pure functions of their inputs and an explicit
numpy Generator; nothing in this module keeps global state.
"""

import enum
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ValidationError

__all__ = [
    "FailureMode",
    "ScenarioConfig",
    "MeasurementMatrix",
    "build_steering_matrix",
    "sample_signal",
    "sample_reverberation",
    "scale_to_ssr",
    "sample_failure_mask",
    "assemble_measurement",
    "simulate_scenario",
]


class FailureMode(enum.Enum):
    RANDOM_CHANNELS = "RandomChannels"
    CONTIGUOUS_CHANNELS = "ContiguousChannels"


def _n_failed(failure_fraction: float, n_sensors: int) -> int:
    # round-half-up so grid cells are reproducible across platforms
    return int(math.floor(failure_fraction * n_sensors + 0.5))


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one synthetic experiment.

    Angles are in degrees within the open interval (-90, 90); ssr_db is the
    signal-to-reverberation ratio in dB; k_dof is the degrees of freedom of
    the reverberation envelope (small values = heavier tail).
    """

    n_sensors: int
    n_snapshots: int
    n_sources: int
    dir_angles: tuple
    ssr_db: float
    failure_fraction: float
    failure_mode: FailureMode
    k_dof: float
    rng_seed: int

    def __post_init__(self):
        object.__setattr__(self, "dir_angles", tuple(float(a) for a in self.dir_angles))
        n, m, r = self.n_sensors, self.n_snapshots, self.n_sources
        if not (0 < r < n < m):
            raise ValidationError(
                f"need 0 < n_sources < n_sensors < n_snapshots, got r={r}, N={n}, M={m}")
        if len(self.dir_angles) != r:
            raise ValidationError(
                f"dir_angles has {len(self.dir_angles)} entries, expected n_sources={r}")
        _validate_angles(self.dir_angles)
        if not 0.0 <= self.failure_fraction < 1.0:
            raise ValidationError(f"failure_fraction={self.failure_fraction} outside [0, 1)")
        if n - _n_failed(self.failure_fraction, n) < r + 1:
            raise ValidationError(
                f"failure_fraction={self.failure_fraction} leaves fewer than "
                f"n_sources+1={r + 1} observed channels")
        if self.k_dof <= 0:
            raise ValidationError(f"k_dof={self.k_dof} must be positive")
        if not 0 <= self.rng_seed < 2 ** 64:
            raise ValidationError("rng_seed must fit in an unsigned 64-bit integer")

    def to_dict(self) -> dict:
        return {
            "n_sensors": self.n_sensors,
            "n_snapshots": self.n_snapshots,
            "n_sources": self.n_sources,
            "dir_angles": list(self.dir_angles),
            "ssr_db": self.ssr_db,
            "failure_fraction": self.failure_fraction,
            "failure_mode": self.failure_mode.value,
            "k_dof": self.k_dof,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        known = {"n_sensors", "n_snapshots", "n_sources", "dir_angles", "ssr_db",
                 "failure_fraction", "failure_mode", "k_dof", "rng_seed"}
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown scenario keys: {sorted(unknown)}")
        missing = known - set(d)
        if missing:
            raise ValidationError(f"missing scenario keys: {sorted(missing)}")
        try:
            mode = FailureMode(d["failure_mode"])
        except ValueError:
            raise ValidationError(
                f"failure_mode must be one of "
                f"{[m.value for m in FailureMode]}, got {d['failure_mode']!r}") from None
        return cls(
            n_sensors=int(d["n_sensors"]),
            n_snapshots=int(d["n_snapshots"]),
            n_sources=int(d["n_sources"]),
            dir_angles=tuple(d["dir_angles"]),
            ssr_db=float(d["ssr_db"]),
            failure_fraction=float(d["failure_fraction"]),
            failure_mode=mode,
            k_dof=float(d["k_dof"]),
            rng_seed=int(d["rng_seed"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        return cls.from_dict(json.loads(text))

    def with_cell(self, ssr_db: float, failure_fraction: float,
                  rng_seed: int) -> "ScenarioConfig":
        """Copy of this config at one Monte-Carlo grid cell."""
        return replace(self, ssr_db=ssr_db, failure_fraction=failure_fraction,
                       rng_seed=rng_seed)


@dataclass(frozen=True)
class MeasurementMatrix:
    """Masked M x N array data, its mask, and the clean N x M ground truth."""

    x: np.ndarray      # complex, M x N, zero at masked positions
    mask: np.ndarray   # {0,1}, M x N, 1 = observed
    clean: np.ndarray  # complex, N x M, A(theta) @ S (simulation-only truth)


def _validate_angles(angles) -> None:
    for a in angles:
        if not -90.0 < a < 90.0:
            raise ValidationError(f"angle {a} outside the open interval (-90, 90)")
    if len(set(angles)) != len(angles):
        raise ValidationError(f"duplicate direction angles in {list(angles)}")


def build_steering_matrix(angles_deg, n_sensors: int) -> np.ndarray:
    """N x r steering matrix of a half-wavelength ULA.

    Column p holds exp(1j * pi * k * sin(theta_p)) for sensor index
    k = 0 .. N-1; the phase reference is sensor 0, so the first row is all
    ones and every entry has unit modulus.
    """
    if n_sensors < 1:
        raise ValidationError(f"n_sensors={n_sensors} must be >= 1")
    angles = np.atleast_1d(np.asarray(angles_deg, dtype=float))
    _validate_angles(angles.tolist())
    k = np.arange(n_sensors)[:, None]
    return np.exp(1j * np.pi * k * np.sin(np.deg2rad(angles))[None, :])


def sample_signal(n_sources: int, n_snapshots: int, rng: np.random.Generator) -> np.ndarray:
    """r x M i.i.d. circular complex Gaussian source samples, unit variance."""
    if n_sources < 1 or n_snapshots < 1:
        raise ValidationError("n_sources and n_snapshots must be >= 1")
    shape = (n_sources, n_snapshots)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def sample_reverberation(n_sensors: int, n_snapshots: int, k_dof: float,
                         rng: np.random.Generator) -> np.ndarray:
    """N x M reverberation draw: chi-square-form envelope, uniform phase.

    The envelope density is x^(n/2-1) * exp(-x/2) / (2^(n/2) * Gamma(n/2))
    for x > 0, i.e. a Gamma distribution with shape n/2 and scale 2 (mean n,
    variance 2n).  Small k_dof gives the spiky, heavy-tailed envelopes of
    high-resolution reverberation.
    """
    if k_dof <= 0:
        raise ValidationError(f"k_dof={k_dof} must be positive")
    shape = (n_sensors, n_snapshots)
    envelope = rng.gamma(shape=k_dof / 2.0, scale=2.0, size=shape)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=shape)
    return envelope * np.exp(1j * phase)


def scale_to_ssr(signal: np.ndarray, reverb: np.ndarray, ssr_db: float) -> np.ndarray:
    """Rescale a reverberation matrix to a target signal-to-reverberation ratio.

    ``signal`` is the array-domain signal A(theta) @ S; the returned matrix
    is reverb * c with c > 0 chosen so that
    10*log10(var(signal) / var(scaled reverb)) == ssr_db, variances taken
    over the complex entries.  ssr_db = inf yields an all-zero matrix
    (reverberation-free scenario).
    """
    sig_var = np.var(signal)
    rev_var = np.var(reverb)
    if rev_var == 0.0:
        raise ValidationError("cannot scale an all-zero reverberation matrix")
    if sig_var == 0.0:
        raise ValidationError("cannot scale against an all-zero signal matrix")
    target = sig_var / 10.0 ** (ssr_db / 10.0)
    return reverb * np.sqrt(target / rev_var)


def sample_failure_mask(n_sensors: int, n_snapshots: int, failure_fraction: float,
                        mode: FailureMode, rng: np.random.Generator) -> np.ndarray:
    """M x N binary mask with round(fraction*N) whole channels zeroed.

    A failed channel is missing for the entire observation window, so the
    corresponding column of the M x N data matrix is zeroed.  RandomChannels
    draws the failed set uniformly without replacement; ContiguousChannels
    zeroes a run of consecutive channels starting at a uniform position
    (no wraparound).
    """
    if not 0.0 <= failure_fraction < 1.0:
        raise ValidationError(f"failure_fraction={failure_fraction} outside [0, 1)")
    n_fail = _n_failed(failure_fraction, n_sensors)
    if n_sensors - n_fail < 1:
        raise ValidationError(
            f"failure_fraction={failure_fraction} leaves no observed channels")
    mask = np.ones((n_snapshots, n_sensors), dtype=np.int8)
    if n_fail == 0:
        return mask
    if mode is FailureMode.RANDOM_CHANNELS:
        failed = rng.choice(n_sensors, size=n_fail, replace=False)
    elif mode is FailureMode.CONTIGUOUS_CHANNELS:
        start = int(rng.integers(0, n_sensors - n_fail + 1))
        failed = np.arange(start, start + n_fail)
    else:
        raise ValidationError(f"unknown failure mode {mode!r}")
    mask[:, failed] = 0
    return mask


def assemble_measurement(steering: np.ndarray, signal: np.ndarray,
                         reverb: np.ndarray, mask: np.ndarray) -> MeasurementMatrix:
    """Combine steering, sources, reverberation and mask into X = B o (A@S + R)^T."""
    a = np.asarray(steering)
    s = np.asarray(signal)
    r = np.asarray(reverb)
    b = np.asarray(mask)
    n, n_src = a.shape
    if s.shape[0] != n_src:
        raise ValidationError(f"signal has {s.shape[0]} rows, steering has {n_src} columns")
    m = s.shape[1]
    if r.shape != (n, m):
        raise ValidationError(f"reverberation shape {r.shape} != ({n}, {m})")
    if b.shape != (m, n):
        raise ValidationError(f"mask shape {b.shape} != ({m}, {n})")
    clean = a @ s
    x = b * (clean + r).T
    return MeasurementMatrix(x=x, mask=b.astype(np.int8), clean=clean)


def simulate_scenario(config: ScenarioConfig) -> MeasurementMatrix:
    """Generate one seeded measurement: steering, sources, scaled reverberation,
    failure mask, and the masked data matrix.

    Identical configs (including rng_seed) produce bitwise-identical output;
    the draw order (signal, reverberation, mask) is part of that contract.
    """
    rng = np.random.default_rng(np.random.PCG64(config.rng_seed))
    a = build_steering_matrix(config.dir_angles, config.n_sensors)
    s = sample_signal(config.n_sources, config.n_snapshots, rng)
    r = sample_reverberation(config.n_sensors, config.n_snapshots, config.k_dof, rng)
    r = scale_to_ssr(a @ s, r, config.ssr_db)
    b = sample_failure_mask(config.n_sensors, config.n_snapshots,
                            config.failure_fraction, config.failure_mode, rng)
    return assemble_measurement(a, s, r, b)
