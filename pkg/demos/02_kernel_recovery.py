"""Recovering a kernel from its mean, and rejecting things that are not means.

The recovery only reads a few sections of U, so a perturbed U still produces
some array; the round-trip residual is what tells the two cases apart.
"""

import numpy as np

from genmean import AnchorSelection, GridFunction, g_mn, make_space, recover_kernel

rng = np.random.default_rng(1)
space = make_space([f"x{i}" for i in range(4)], rng.uniform(0.2, 1.0, 4))
u = GridFunction(space, 2, rng.standard_normal((4, 4)))
U = g_mn(u, 4)

for anchors in [None, AnchorSelection((3,), (1,)), AnchorSelection.random(4, 4, rng)]:
    rec = recover_kernel(U, 2, anchors)
    err = np.max(np.abs(rec.kernel.values - u.values))
    print(f"anchors={anchors}: max error {err:.2e}, residual {rec.residual:.2e}")

vals = U.values.copy()
vals[0, 1, 2, 3] += 1e-3
rec = recover_kernel(GridFunction(space, 4, vals), 2)
print(f"perturbed mean: residual {rec.residual:.2e}, accepted={rec.ok}")
