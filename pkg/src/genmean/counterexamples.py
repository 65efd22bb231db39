"""Desk-scale builders for the four counterexamples.

* ``ex1``: typewriter indicators on a dyadic grid of ``[0, 1]``. Kernels
  ``u_k = 2k (1 - f_k)`` oscillate at every atom while their means
  ``G_{1,2}(u_k)`` blow up off a fattened diagonal whose mass shrinks with
  the grid. A finite shadow of a non-atomic phenomenon, not a reproduction.
* ``ex2``: a symmetric order-two kernel unbounded below whose 3-mean is
  nonnegative.
* ``ex3``: a density and kernel where the mean is integrable but the kernel
  is not; partial sums over ``[1, M]^2`` show one series settling and the
  other growing like a harmonic sum.
* ``ex4``: ``P = 3|x_1 - x_2|`` on a uniform grid, which violates the section
  lower bound because it vanishes on the diagonal.

Blocks and intervals of the constructions become single atoms weighted by
their measure; the functions involved are constant on blocks, so this loses
nothing for ``ex2`` and ``ex3``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import lr_norm
from .densities import SymmetricDensity, make_density, reduce
from .errors import BadGrid, InvalidInput
from .measure_space import GridFunction, MeasureSpace, check_budget, compensated_sum, make_space
from .operators import g_mn


@dataclass
class ConvergenceTrace:
    """Per-step summaries of a sequence construction."""

    steps: list = field(default_factory=list)
    per_step: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.steps) != len(self.per_step):
            raise InvalidInput("per_step must have one entry per step")

    def to_dict(self) -> dict:
        return {"steps": list(self.steps), "per_step": list(self.per_step), "meta": dict(self.meta)}


# -- ex1: typewriter kernels ----------------------------------------------


def typewriter_interval(k: int) -> tuple[int, int]:
    """``J_k`` as ``(level, position)``: ``[pos / 2**level, (pos + 1) / 2**level]``.

    ``J_1 = [0, 1], J_2 = [0, 1/2], J_3 = [1/2, 1], J_4 = [0, 1/4], ...``
    """
    if k < 1:
        raise InvalidInput("typewriter steps start at 1")
    level = k.bit_length() - 1
    return level, k - (1 << level)


def _typewriter_mask(grid_n: int, k: int) -> np.ndarray:
    # midpoint (2i+1)/(2n) lies in the closed interval [p, p+1] / 2**level
    level, pos = typewriter_interval(k)
    odd = 2 * np.arange(grid_n) + 1
    scaled = odd * (1 << level)
    return (scaled >= 2 * grid_n * pos) & (scaled <= 2 * grid_n * (pos + 1))


def dyadic_space(grid_n: int) -> MeasureSpace:
    """Midpoints of ``grid_n`` equal cells of ``[0, 1]``, weight ``1 / grid_n``."""
    return make_space([f"{(2 * i + 1) / (2 * grid_n):.17g}" for i in range(grid_n)], [1.0 / grid_n] * grid_n)


def fattened_diagonal_mass(grid_n: int, level: int) -> float:
    """Mass of ``{|x_1 - x_2| <= 2**(1 - level)}`` on the midpoint grid."""
    i = np.arange(grid_n)
    # |x_i - x_j| = |i - j| / n <= 2 / 2**level  <=>  |i - j| * 2**level <= 2 n
    close = np.abs(i[:, None] - i[None, :]) * (1 << level) <= 2 * grid_n
    return float(close.sum()) / grid_n**2


def build_ex1(grid_n: int, steps: int) -> ConvergenceTrace:
    """Trace of ``u_k = 2k(1 - f_k)`` and ``U_k = G_{1,2}(u_k)`` for ``k = 1..steps``.

    Each step records the range of ``u_k``, the weight fraction of
    off-diagonal pairs with ``U_k >= k``, the weight fraction of all pairs
    with ``U_k < k`` (the exceptional set), and the mass of the fattened
    diagonal ``|x_1 - x_2| <= 2**(1 - level)`` that contains it.

    ``meta["oscillation"]`` checks, for every complete dyadic level, that each
    atom sees ``u_k = 0`` and (for levels >= 1) ``u_k = 2k`` within the level.
    """
    if grid_n < 4 or grid_n & (grid_n - 1):
        raise BadGrid("grid_n must be a power of 2 and at least 4")
    check_budget(grid_n, 2)
    if steps < 1:
        raise BadGrid("steps must be >= 1")
    space = dyadic_space(grid_n)
    w2 = space.product_weights(2)
    off = ~np.eye(grid_n, dtype=bool)
    off_mass = compensated_sum(w2[off])
    hits_zero = {}
    hits_top = {}
    per_step = []
    for k in range(1, steps + 1):
        level, _ = typewriter_interval(k)
        inside = _typewriter_mask(grid_n, k)
        u = GridFunction(space, 1, np.where(inside, 0.0, 2.0 * k))
        U = g_mn(u, 2).values
        hits_zero.setdefault(level, np.zeros(grid_n, bool))
        hits_top.setdefault(level, np.zeros(grid_n, bool))
        hits_zero[level] |= u.values == 0.0
        hits_top[level] |= u.values == 2.0 * k
        big = U >= k
        per_step.append(
            {
                "k": k,
                "level": level,
                "u_min": float(u.values.min()),
                "u_max": float(u.values.max()),
                "offdiag_fraction_ge_k": compensated_sum(w2[big & off]) / off_mass,
                "exceptional_fraction": compensated_sum(w2[~big]),
                "fattened_diagonal_mass": fattened_diagonal_mass(grid_n, level),
                "U_max_norm": float(np.max(np.abs(U))),
                "U_l1_norm": compensated_sum(np.abs(U) * w2),
            }
        )
    last_level = typewriter_interval(steps)[0]
    complete = [lv for lv in sorted(hits_zero) if lv < last_level or steps == (1 << (lv + 1)) - 1]
    atom_ok = np.ones(grid_n, bool)
    for lv in complete:
        atom_ok &= hits_zero[lv]
        if lv >= 1:
            atom_ok &= hits_top[lv]
    return ConvergenceTrace(
        list(range(1, steps + 1)),
        per_step,
        {
            "example": "ex1",
            "grid_n": grid_n,
            "steps": steps,
            "complete_levels": complete,
            "oscillation": {
                "fraction_of_atoms": float(atom_ok.mean()) if complete else 0.0,
                "zero_hit_per_level": {str(lv): bool(hits_zero[lv].all()) for lv in complete},
                "top_hit_per_level": {str(lv): bool(hits_top[lv].all()) for lv in complete if lv >= 1},
            },
        },
    )


# -- ex2: kernel unbounded below -------------------------------------------


def build_ex2(M: int) -> tuple[MeasureSpace, GridFunction]:
    """Blocks ``i = -M..M`` of unit weight; ``u = |i| + |j|`` unless ``i = -j``,
    where ``u = -|j|``."""
    if M < 1:
        raise InvalidInput("M must be >= 1")
    idx = np.arange(-M, M + 1)
    space = make_space([f"L{i}" for i in idx], np.ones(len(idx)))
    i, j = np.meshgrid(idx, idx, indexing="ij")
    u = np.where(i == -j, -np.abs(j), np.abs(i) + np.abs(j)).astype(np.float64)
    return space, GridFunction(space, 2, u)


# -- ex3: integrability gap ------------------------------------------------


def ex3_weights(i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """``p_ij = (i+j)^-2`` if ``|i-j| = 1`` else ``(i+j)^-4``, 1-based indices."""
    s = (i + j).astype(np.float64)
    return np.where(np.abs(i - j) == 1, s**-2, s**-4)


def ex3_kernel_values(M: int) -> np.ndarray:
    """``u = 2 (-1)^i i`` on ``I_i``, ``i = 1..M``."""
    i = np.arange(1, M + 1)
    return 2.0 * np.where(i % 2 == 0, i, -i)


def build_ex3(M: int) -> tuple[MeasureSpace, SymmetricDensity, GridFunction]:
    """Truncation to ``I_1..I_M`` (unit-weight atoms) of the density and kernel.

    The density is returned with ``normalized=False``: its mass is not 1.
    """
    if M < 2:
        raise InvalidInput("M must be >= 2")
    check_budget(M, 2)
    space = make_space([f"I{i}" for i in range(1, M + 1)], np.ones(M))
    i = np.arange(1, M + 1)
    P = make_density(space, ex3_weights(i[:, None], i[None, :]), normalized=False)
    u = GridFunction(space, 1, ex3_kernel_values(M))
    return space, P, u


def ex3_partial_sums(M: int, dense: bool | None = None) -> dict:
    """``S_U(M) = |G_{1,2}(u)|_{1,P}`` and ``S_u(M) = |u|_{1,P_(1)}`` over ``[1, M]^2``.

    Small ``M`` goes through the dense grid operators; large ``M`` streams one
    column at a time with Neumaier compensation so memory stays ``O(M)``.
    """
    if M < 2:
        raise InvalidInput("M must be >= 2")
    if dense is None:
        dense = M <= 1000
    if dense:
        _, P, u = build_ex3(M)
        U = g_mn(u, 2)
        return {
            "M": M,
            "S_U": lr_norm(U, P, 1.0),
            "S_u": lr_norm(u, reduce(P, 1), 1.0),
        }
    i = np.arange(1, M + 1)
    half_u = ex3_kernel_values(M) / 2.0
    lam = np.zeros(M)
    lam_c = np.zeros(M)
    row = np.zeros(M)
    row_c = np.zeros(M)

    def add(total, comp, term):
        t = total + term
        comp += np.where(np.abs(total) >= np.abs(term), (total - t) + term, (term - t) + total)
        return t

    for j in range(1, M + 1):
        p = ex3_weights(i, j)
        lam = add(lam, lam_c, p)
        row = add(row, row_c, np.abs(half_u + half_u[j - 1]) * p)
    lam = lam + lam_c
    row = row + row_c
    return {
        "M": M,
        "S_U": compensated_sum(row),
        "S_u": compensated_sum(np.abs(2.0 * half_u) * lam),
    }


def ex3_tail_bound(M: int, upper: int = 10**7) -> float:
    """Majorant ``sum_{k>M} (k-1) k^-3`` of the non-adjacent tail."""
    k = np.arange(M + 1, upper, dtype=np.float64)
    return compensated_sum((k - 1) / k**3) + 1.0 / upper


def build_ex3_trace(Ms=(100, 1000, 10000)) -> ConvergenceTrace:
    per = [ex3_partial_sums(int(M)) for M in Ms]
    return ConvergenceTrace(
        [int(M) for M in Ms],
        per,
        {"example": "ex3", "tail_bounds": {str(M): ex3_tail_bound(int(M)) for M in Ms}},
    )


# -- ex4: density vanishing on the diagonal --------------------------------


def build_ex4(grid_n: int) -> SymmetricDensity:
    """``P(x_1, x_2) = 3|x_1 - x_2|`` on the midpoints of ``grid_n`` cells of ``[0, 1]``.

    The discrete mass is ``1 - 1/grid_n**2``, so the density is flagged
    unnormalized.
    """
    if grid_n < 2:
        raise BadGrid("grid_n must be >= 2")
    check_budget(grid_n, 2)
    x = (2 * np.arange(grid_n) + 1) / (2 * grid_n)
    space = make_space([f"{v:.17g}" for v in x], [1.0 / grid_n] * grid_n)
    return make_density(space, 3.0 * np.abs(x[:, None] - x[None, :]), normalized=False)


def ex4_marginal_closed_form(x: np.ndarray) -> np.ndarray:
    """Continuum one-variable reduction ``3 (x^2 - x + 1/2)``."""
    return 3.0 * (x**2 - x + 0.5)
