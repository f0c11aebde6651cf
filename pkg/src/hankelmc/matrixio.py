"""CSV matrix formats and the combined JSON config document.

Matrix CSV: first line ``<rows>,<cols>``, then one line ``i,j,re,im`` per
entry with 0-based indices and 17-significant-digit floats, which round-trip
float64 bit-exactly.  Mask CSV: same header, lines ``i,j,bit``.

Config JSON: one document with optional ``scenario``, ``solver`` and
``grid`` sections; unknown keys are rejected at every level so typos fail
loudly instead of silently running defaults.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .simulate import ScenarioConfig
from .solver import SolverOptions

__all__ = [
    "write_matrix_csv",
    "read_matrix_csv",
    "write_mask_csv",
    "read_mask_csv",
    "HarnessConfig",
    "load_config",
]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_matrix_csv(path, matrix: np.ndarray) -> None:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got ndim={m.ndim}")
    with open(path, "w", newline="") as fh:
        fh.write(f"{m.shape[0]},{m.shape[1]}\n")
        for i in range(m.shape[0]):
            for j in range(m.shape[1]):
                fh.write(f"{i},{j},{_fmt(m[i, j].real)},{_fmt(m[i, j].imag)}\n")


def read_matrix_csv(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"matrix file not found: {path}")
    with open(path, newline="") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    try:
        rows, cols = (int(t) for t in lines[0].split(","))
        out = np.zeros((rows, cols), dtype=complex)
        seen = np.zeros((rows, cols), dtype=bool)
        for ln in lines[1:]:
            i_s, j_s, re_s, im_s = ln.split(",")
            i, j = int(i_s), int(j_s)
            out[i, j] = float(re_s) + 1j * float(im_s)
            seen[i, j] = True
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"malformed matrix CSV {path}: {exc}") from None
    if not seen.all():
        raise ValidationError(f"matrix CSV {path} is missing entries")
    return out


def write_mask_csv(path, mask: np.ndarray) -> None:
    b = np.asarray(mask)
    if b.ndim != 2:
        raise ValidationError(f"expected a 2-D mask, got ndim={b.ndim}")
    with open(path, "w", newline="") as fh:
        fh.write(f"{b.shape[0]},{b.shape[1]}\n")
        for i in range(b.shape[0]):
            for j in range(b.shape[1]):
                fh.write(f"{i},{j},{1 if b[i, j] else 0}\n")


def read_mask_csv(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"mask file not found: {path}")
    with open(path, newline="") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    try:
        rows, cols = (int(t) for t in lines[0].split(","))
        out = np.zeros((rows, cols), dtype=np.int8)
        seen = np.zeros((rows, cols), dtype=bool)
        for ln in lines[1:]:
            i_s, j_s, bit_s = ln.split(",")
            bit = int(bit_s)
            if bit not in (0, 1):
                raise ValueError(f"mask bit must be 0 or 1, got {bit}")
            out[int(i_s), int(j_s)] = bit
            seen[int(i_s), int(j_s)] = True
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"malformed mask CSV {path}: {exc}") from None
    if not seen.all():
        raise ValidationError(f"mask CSV {path} is missing entries")
    return out


@dataclass(frozen=True)
class HarnessConfig:
    """Parsed config document; absent sections stay None (defaults apply)."""

    scenario: ScenarioConfig = None
    solver: SolverOptions = None
    grid: dict = None  # raw grid section; experiments interpret it


def load_config(path) -> HarnessConfig:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"config file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ValidationError(f"config {path} must be a JSON object")
    unknown = set(doc) - {"scenario", "solver", "grid"}
    if unknown:
        raise ValidationError(f"unknown config sections: {sorted(unknown)}")
    scenario = ScenarioConfig.from_dict(doc["scenario"]) if "scenario" in doc else None
    solver = SolverOptions.from_dict(doc["solver"]) if "solver" in doc else None
    grid = doc.get("grid")
    return HarnessConfig(scenario=scenario, solver=solver, grid=grid)
