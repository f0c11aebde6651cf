"""Why lifting helps: a dead channel is a missing COLUMN, which no completion
method can restore directly -- there is nothing to interpolate from.  The
block-Hankel rearrangement spreads every channel across an anti-diagonal, so
the same dead channel becomes scattered missing entries instead.
"""

import numpy as np

from hankelmc import HankelShape, antidiagonal_weights, lift, lift_mask, unlift

x = np.array([[1.0, 4.0, 7.0, 10.0],
              [2.0, 5.0, 8.0, 11.0],
              [3.0, 6.0, 9.0, 12.0]])
print("data matrix X (3 snapshots x 4 channels):")
print(x)

lifted = lift(x, n1=2)
print("\nblock-Hankel lift with n1=2 (6 x 3):")
print(lifted.z)
print("block row k repeats channels k..k+2: every column of X now shows up "
      "in two places")

mask = np.ones((3, 4))
mask[:, 1] = 0  # channel 2 dead
lm = lift_mask(mask, n1=2)
print("\nchannel 2 dead -> lifted observation mask:")
print(lm.omega.astype(int))
print("the missing entries are scattered; every lifted row and column still "
      "has observed entries")
print("observed rows per lifted column :", [[int(i) for i in s] for s in lm.col_sets])
print("observed cols per lifted row    :", [[int(j) for j in s] for s in lm.row_sets])

w = antidiagonal_weights(HankelShape(3, 4, 2))
print("\nanti-diagonal multiplicities w =", w.tolist(),
      "(the inverse map averages duplicates)")
print("roundtrip is exact:",
      np.allclose(unlift(lift(x, 2)), x, rtol=1e-14, atol=0))
