"""
Linear motion kernels
=====================

The blur task uses a one-pixel-wide line segment as its point spread
function.  Its weights come from area coverage, so every kernel is
nonnegative and sums to one.
"""

import numpy as np

from progbench.imaging import motion_kernel

np.set_printoptions(precision=3, suppress=True, linewidth=120)

# A horizontal kernel of length 5 is a single row of equal weights.
print(motion_kernel(5, 0.0))

# %%
# Diagonal segments spread their mass over neighbouring pixels.
k = motion_kernel(7, 30.0)
print(k)
print("sum:", k.sum())

# %%
# Direction is only defined up to a half turn.
print(np.array_equal(motion_kernel(21, 40.0), motion_kernel(21, 220.0)))
