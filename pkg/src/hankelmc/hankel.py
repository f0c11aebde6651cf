"""Block-Hankel lift of an array-data matrix and its weighted inverse.

An M x N data matrix X with columns x_1 .. x_N (one column per channel) is
rearranged into the block-Hankel matrix

        [ x_1      x_2      ...  x_n2   ]
    Z = [ x_2      x_3      ...  x_n2+1 ]      Z in C^{(M*n1) x n2},
        [ ...                           ]
        [ x_n1     x_n1+1   ...  x_N    ]

with n1 + n2 = N + 1.  Each column of X appears on one anti-diagonal of the
block grid, so a fully missing channel turns into scattered missing entries
of Z instead of a missing column -- which is what makes completion of failed
channels possible.  The inverse map averages each anti-diagonal back into a
single column.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import StructuralMaskError, ValidationError

__all__ = [
    "HankelShape",
    "LiftedMatrix",
    "LiftedMask",
    "default_n1",
    "antidiagonal_weights",
    "lift",
    "lift_mask",
    "unlift",
]


def default_n1(n_channels: int) -> int:
    """Default number of block rows: floor(N/2), clamped to at least 1."""
    return max(1, n_channels // 2)


@dataclass(frozen=True)
class HankelShape:
    """Dimensions of a block-Hankel rearrangement of an M x N matrix."""

    m: int
    n: int
    n1: int
    n2: int = field(init=False)

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValidationError(f"matrix shape ({self.m}, {self.n}) must be positive")
        if not 1 <= self.n1 <= self.n:
            raise ValidationError(f"n1={self.n1} outside [1, {self.n}]")
        object.__setattr__(self, "n2", self.n + 1 - self.n1)

    @property
    def lifted_shape(self):
        return (self.m * self.n1, self.n2)


@dataclass(frozen=True)
class LiftedMatrix:
    """A block-Hankel matrix together with the shape it was lifted from."""

    z: np.ndarray
    shape: HankelShape

    def block(self, k1: int, k2: int) -> np.ndarray:
        """Return block (k1, k2), 0-based; equals column k1+k2 of the source."""
        m = self.shape.m
        return self.z[k1 * m:(k1 + 1) * m, k2]


@dataclass(frozen=True)
class LiftedMask:
    """Lifted observation mask with per-column/per-row observed index sets.

    ``col_sets[jj]`` holds the sorted observed row indices of lifted column
    jj and ``row_sets[ii]`` the sorted observed column indices of lifted row
    ii (0-based).  Together they drive the per-column / per-row subproblems
    of the completion solver.
    """

    omega: np.ndarray  # bool, (m*n1, n2)
    shape: HankelShape
    col_sets: list
    row_sets: list


def antidiagonal_weights(shape: HankelShape) -> np.ndarray:
    """Number of lifted cells on each of the N anti-diagonals.

    Anti-diagonal j (1-based) collects the block positions (k1, k2) with
    k1 + k2 = j + 1, hence w_j = min(j, n1, n2, N + 1 - j).  The first and
    last anti-diagonals always hold a single cell.
    """
    j = np.arange(1, shape.n + 1)
    return np.minimum.reduce([j, np.full_like(j, shape.n1),
                              np.full_like(j, shape.n2), shape.n + 1 - j])


def _check_n1(x: np.ndarray, n1: int) -> HankelShape:
    if x.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got ndim={x.ndim}")
    m, n = x.shape
    return HankelShape(m, n, n1)


def lift(x: np.ndarray, n1: int) -> LiftedMatrix:
    """Rearrange an M x N matrix into its (M*n1) x n2 block-Hankel form.

    Block row k1 (0-based) is the column slice x[:, k1 : k1 + n2], so block
    (k1, k2) equals source column k1 + k2.
    """
    shape = _check_n1(np.asarray(x), n1)
    x = np.asarray(x)
    m, n2 = shape.m, shape.n2
    z = np.empty((m * n1, n2), dtype=x.dtype)
    for k1 in range(n1):
        z[k1 * m:(k1 + 1) * m, :] = x[:, k1:k1 + n2]
    return LiftedMatrix(z, shape)


def lift_mask(b: np.ndarray, n1: int) -> LiftedMask:
    """Lift a binary observation mask and derive its observed index sets.

    Raises StructuralMaskError if some lifted column has no observed entry
    at all (that column could never be completed).
    """
    b = np.asarray(b)
    lifted = lift(b.astype(bool), n1)
    omega = lifted.z
    col_sets = [np.flatnonzero(omega[:, jj]) for jj in range(omega.shape[1])]
    empty = [jj for jj, s in enumerate(col_sets) if s.size == 0]
    if empty:
        raise StructuralMaskError(
            f"lifted columns {empty} have no observed entries; "
            "the mask removes entire anti-diagonal runs")
    row_sets = [np.flatnonzero(omega[ii, :]) for ii in range(omega.shape[0])]
    return LiftedMask(omega, lifted.shape, col_sets, row_sets)


def unlift(lifted: LiftedMatrix) -> np.ndarray:
    """Map a lifted matrix back to M x N by averaging each anti-diagonal.

    Entry (i, j) is the arithmetic mean of the w_j cells whose block indices
    satisfy k1 + k2 = j + 1 (1-based).  Exact left inverse of lift: for any
    X, unlift(lift(X)) == X because all cells on an anti-diagonal of a lifted
    matrix carry the same source column.
    """
    shape = lifted.shape
    z = np.asarray(lifted.z)
    if z.shape != shape.lifted_shape:
        raise ValidationError(
            f"lifted data has shape {z.shape}, expected {shape.lifted_shape}")
    m, n, n1, n2 = shape.m, shape.n, shape.n1, shape.n2
    out = np.zeros((m, n), dtype=z.dtype)
    w = antidiagonal_weights(shape)
    for j in range(1, n + 1):  # 1-based anti-diagonal index
        k1_lo = max(1, j + 1 - n2)
        k1_hi = min(n1, j)
        acc = np.zeros(m, dtype=z.dtype)
        for k1 in range(k1_lo, k1_hi + 1):
            k2 = j + 1 - k1
            acc += z[(k1 - 1) * m:k1 * m, k2 - 1]
        out[:, j - 1] = acc / w[j - 1]
    return out
