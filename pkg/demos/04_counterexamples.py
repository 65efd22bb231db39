"""The four counterexamples at desk scale."""

from genmean import build_ex1, build_ex2, build_ex3_trace, build_ex4, check_section_bound, g_mn

trace = build_ex1(64, 63)
last = trace.per_step[-1]
print("typewriter kernels, 64-cell grid, 63 steps")
print(f"  atoms where u_k keeps oscillating: {trace.meta['oscillation']['fraction_of_atoms']:.0%}")
print(f"  mass of pairs with U_k < k: {last['exceptional_fraction']:.6f}")
print(f"  fattened diagonal mass:     {last['fattened_diagonal_mass']:.6f}")

for M in (3, 5, 8):
    _, u = build_ex2(M)
    print(f"order-two kernel, M={M}: min u = {u.values.min():g}, min G_(2,3)(u) = {g_mn(u, 3).values.min():g}")

t = build_ex3_trace((100, 1000, 10000))
print("integrable mean, non-integrable kernel")
for s in t.per_step:
    print(f"  M={s['M']:>6}: S_u = {s['S_u']:.6f}   S_U = {s['S_U']:.6f}")

for n in (4, 16, 128):
    rep = check_section_bound(build_ex4(n))
    print(f"P = 3|x - y| on {n} cells: section condition holds = {rep.holds}, max gamma = {rep.gamma.max():g}")
