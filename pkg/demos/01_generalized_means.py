"""Forward generalized means on a small weighted space.

Builds an order-two kernel on three atoms, averages it over the increasing
slot pairs of three arguments, and checks the expectation identity against a
random symmetric density.
"""

import numpy as np

from genmean import GridFunction, expectation_identity_check, g_mn, make_space, random_symmetric_density

space = make_space(["a", "b", "c"], [0.2, 0.3, 0.5])
u = GridFunction(space, 2, [[1.0, 2.0, 0.0], [2.0, 5.0, -1.0], [0.0, -1.0, 3.0]])

U = g_mn(u, 3)
print("U(a, a, b) =", U(0, 0, 1), " (hand value (1 + 2 + 2) / 3)")
print("U is an average of values of u:", U.values.min() >= u.values.min(), U.values.max() <= u.values.max())

P = random_symmetric_density(space, 3, np.random.default_rng(0))
lhs, rhs = expectation_identity_check(u, P)
print(f"integral of G(u) P = {lhs:.15f}")
print(f"integral of u P_(2) = {rhs:.15f}")
