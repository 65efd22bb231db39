"""Bound constants for kernel recovery and how loose they are in practice."""

import numpy as np

from genmean import (
    bound_table,
    check_section_bound,
    perturb_toward_product,
    random_bounds_suite,
    random_symmetric_density,
    uniform_rho,
    uniform_space,
)

table = bound_table(5)
for N in range(2, 6):
    print(f"N={N}: " + "  ".join(f"C({m},{N})={table.c_inf[(m, N)]:.6g}" for m in range(1, N + 1)))

space = uniform_space(3)
rng = np.random.default_rng(2)
raw = random_symmetric_density(space, 3, rng, zero_fraction=0.6)
print("raw density passes the section check:", check_section_bound(raw).holds)
P = perturb_toward_product(raw, uniform_rho(space), 10)
rep = check_section_bound(P)
print(f"perturbed: holds={rep.holds}, alpha={rep.alpha:.4g}, beta={rep.beta:.4g}")
t = bound_table(3, P, 2.0)
print("L^2 constants:", {k: round(v, 3) for k, v in t.c_r.items()})

suite = random_bounds_suite(200, seed=0)
print(f"200 random instances all within bounds: {suite['all_ok']}")
# m = N (identity) and m = 1 in the max norm attain their constants, so look at 2 <= m < N.
pairs = zip(suite["constants"], suite["norms"])
loose = [n["recovered"] / (c["constant"] * n["mean"]) for c, n in pairs if 2 <= c["m"] < c["N"] and n["mean"] > 0]
print(f"largest observed |K(U)| / (C |U|) with 2 <= m < N: {max(loose):.4f}")
