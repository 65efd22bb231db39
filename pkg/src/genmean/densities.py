"""Symmetric densities on ``Lambda^N`` and their marginal reductions.

A density here is taken with respect to the product measure ``d^N x``, so
the probability of an atom is ``P[idx] * product_weight(idx)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ArityError, InvalidInput, NonPositiveRho, NotADensity, ShapeMismatch
from .measure_space import GridFunction, MeasureSpace, check_budget, contract_last, integrate
from .operators import g_mn, is_symmetric

NORMALIZATION_TOL = 1e-10
ZERO_TOL = 1e-12


@dataclass(frozen=True)
class SymmetricDensity:
    """Nonnegative symmetric grid function, optionally of unit mass.

    ``normalized=False`` admits densities whose total mass is not 1 (such as
    truncations of an infinite-volume construction).
    """

    inner: GridFunction
    normalized: bool = True

    def __post_init__(self):
        vals = self.inner.values
        if np.any(vals < 0):
            raise NotADensity("density values must be >= 0")
        if not is_symmetric(vals):
            raise NotADensity("density is not symmetric under argument permutations")
        if self.normalized:
            mass = integrate(self.inner)
            if abs(mass - 1.0) > NORMALIZATION_TOL:
                raise NotADensity(f"density flagged normalized has mass {mass!r}")

    @property
    def space(self) -> MeasureSpace:
        return self.inner.space

    @property
    def arity(self) -> int:
        return self.inner.arity

    @property
    def values(self) -> np.ndarray:
        return self.inner.values

    @property
    def mass(self) -> float:
        return integrate(self.inner)


def make_density(space: MeasureSpace, values, normalized: bool | None = None, arity: int | None = None) -> SymmetricDensity:
    """Wrap ``values`` as a density; ``normalized=None`` infers the flag from the mass."""
    vals = np.asarray(values, dtype=np.float64)
    if arity is None:
        arity = vals.ndim if vals.ndim > 1 else _flat_arity(vals.size, space.n)
    inner = GridFunction(space, arity, vals)
    if normalized is None:
        normalized = abs(integrate(inner) - 1.0) <= NORMALIZATION_TOL
    return SymmetricDensity(inner, bool(normalized))


def _flat_arity(size: int, n: int) -> int:
    k = 1
    while n > 1 and n**k < size:
        k += 1
    if n**k != size:
        raise ShapeMismatch(f"{size} values do not form a grid over {n} atoms")
    return k


def normalize(P: SymmetricDensity) -> SymmetricDensity:
    mass = P.mass
    if mass <= 0:
        raise NotADensity("cannot normalize a density of zero mass")
    return SymmetricDensity(P.inner.with_values(P.values / mass), True)


def uniform_rho(space: MeasureSpace) -> SymmetricDensity:
    """Constant probability density ``1 / |Lambda|`` on one variable."""
    return SymmetricDensity(GridFunction(space, 1, np.full(space.n, 1.0 / space.total_mass)), True)


def product_density(rho: SymmetricDensity, N: int) -> SymmetricDensity:
    """``rho`` tensored with itself ``N`` times."""
    if rho.arity != 1:
        raise ArityError("rho must be a density of one variable")
    check_budget(rho.space.n, N)
    grid = np.ones(())
    for _ in range(N):
        grid = np.multiply.outer(grid, rho.values)
    return SymmetricDensity(GridFunction(rho.space, N, grid), rho.normalized)


def random_symmetric_density(
    space: MeasureSpace, N: int, rng: np.random.Generator, zero_fraction: float = 0.0
) -> SymmetricDensity:
    """Random normalized symmetric density; ``zero_fraction`` of orbits set to 0."""
    check_budget(space.n, N)
    raw = rng.random((space.n,) * N)
    if zero_fraction:
        raw = np.where(rng.random(raw.shape) < zero_fraction, 0.0, raw)
    acc = np.zeros_like(raw)
    for perm in itertools.permutations(range(N)):
        acc += np.transpose(raw, perm)
    if not acc.any():
        acc[...] = 1.0
    P = SymmetricDensity(GridFunction(space, N, acc), normalized=False)
    return normalize(P)


def reduce(P: SymmetricDensity, k: int) -> SymmetricDensity:
    """The ``k``-variable reduction ``P_(k)``: integrate out the last ``N - k`` variables.

    Variables are removed one at a time from the last, so
    ``reduce(reduce(P, k), l)`` repeats exactly the operations of
    ``reduce(P, l)`` and the two agree bit for bit.
    """
    N = P.arity
    if not 1 <= k < N:
        raise ArityError(f"reduction order k={k} must satisfy 1 <= k < N={N}")
    vals = P.values
    w = P.space.weights
    for _ in range(N - k):
        vals = contract_last(vals, w)
    return SymmetricDensity(GridFunction(P.space, k, vals), P.normalized)


def marginal(P: SymmetricDensity | GridFunction, keep: tuple[int, ...]) -> np.ndarray:
    """Integrate out every variable not listed in ``keep`` (order preserved).

    Works for non-symmetric arrays; for symmetric ``P`` the result does not
    depend on which ``len(keep)`` positions are kept.
    """
    inner = getattr(P, "inner", P)
    N = inner.arity
    keep = tuple(keep)
    if len(set(keep)) != len(keep) or not all(0 <= a < N for a in keep) or len(keep) >= N:
        raise ArityError(f"invalid axes {keep} for arity {N}")
    drop = [a for a in range(N) if a not in keep]
    vals = np.transpose(inner.values, keep + tuple(drop))
    for _ in drop:
        vals = contract_last(vals, inner.space.weights)
    return vals


def l1_distance(P: SymmetricDensity, Q: SymmetricDensity) -> float:
    """``integral |P - Q| d^N x``."""
    diff = P.inner - Q.inner
    return integrate(diff.with_values(np.abs(diff.values)))


@dataclass(frozen=True)
class SectionBoundReport:
    """Outcome of the section lower-bound check ``P(., a) >= gamma(a) P_(N-1)``.

    ``gamma[a]`` is the largest admissible constant for the anchor atom
    ``a``. ``epsilon`` is half the largest ``gamma`` and ``beta`` the
    constant built from it over last-variable sections. ``alpha`` uses the
    product lower bound ``Gamma(x_2..x_N) = gamma(x_2)...gamma(x_N)`` on
    ``B^(N-1)`` with its own threshold ``epsilon_alpha`` (half the largest
    ``Gamma``); for ``N = 2`` the two thresholds coincide.
    """

    gamma: np.ndarray
    B_atoms: tuple[int, ...]
    holds: bool
    epsilon: float
    alpha: float | None
    beta: float | None
    epsilon_alpha: float
    N: int

    def to_dict(self) -> dict:
        return {
            "gamma": [float(g) for g in self.gamma],
            "B": list(self.B_atoms),
            "holds": self.holds,
            "epsilon": self.epsilon,
            "alpha": self.alpha,
            "beta": self.beta,
            "epsilon_alpha": self.epsilon_alpha,
        }


def check_section_bound(P: SymmetricDensity, zero_tol: float = ZERO_TOL) -> SectionBoundReport:
    """Per-atom section constants ``gamma`` and the derived ``epsilon, alpha, beta``.

    Tuples ``y`` with ``P_(N-1)(y) <= zero_tol`` are skipped in the minimum
    ``gamma(a) = min_y P(y, a) / P_(N-1)(y)``; if every tuple is skipped,
    ``gamma(a) = 0``.
    """
    N = P.arity
    if N < 2:
        raise ArityError("the section condition needs N >= 2")
    space = P.space
    Q = reduce(P, N - 1).values
    mask = Q > zero_tol
    if mask.any():
        ratios = P.values[mask] / Q[mask][:, None]
        gamma = ratios.min(axis=0)
    else:
        gamma = np.zeros(space.n)
    gamma = np.maximum(gamma, 0.0)
    B = tuple(int(a) for a in np.flatnonzero(gamma > zero_tol))
    holds = bool(B)
    gmax = float(gamma.max())
    epsilon = 0.5 * gmax if gmax > zero_tol else 0.0
    alpha = beta = None
    eps_alpha = 0.0
    if holds:
        w = space.weights
        beta = 1.0 / (float(w[gamma > epsilon].sum()) * epsilon)
        g_in_B = np.where(gamma > zero_tol, gamma, 0.0)
        Gamma = np.ones(())
        for _ in range(N - 1):
            Gamma = np.multiply.outer(Gamma, g_in_B)
        eps_alpha = 0.5 * float(Gamma.max())
        mass = float(space.product_weights(N - 1)[Gamma > eps_alpha].sum())
        alpha = 1.0 / (mass * eps_alpha)
    return SectionBoundReport(gamma, B, holds, epsilon, alpha, beta, eps_alpha, N)


def _require_rho(rho: SymmetricDensity, space: MeasureSpace):
    if rho.arity != 1 or rho.space != space:
        raise ShapeMismatch("rho must be a one-variable density on the same space")
    if np.any(rho.values <= 0):
        raise NonPositiveRho("rho must be > 0 at every atom")


def perturb_toward_product(P: SymmetricDensity, rho: SymmetricDensity, n: int) -> SymmetricDensity:
    """``P_n = n/(n+1) (P + rho^N / n)``: positive, symmetric, unit mass."""
    if n < 1:
        raise InvalidInput("n must be >= 1")
    if not P.normalized:
        raise NotADensity("perturbation expects a normalized density")
    _require_rho(rho, P.space)
    prod = product_density(rho, P.arity).values
    vals = (n * P.values + prod) / (n + 1)
    return SymmetricDensity(P.inner.with_values(vals), True)


def perturbation_gamma_floor(P: SymmetricDensity, rho: SymmetricDensity, n: int) -> np.ndarray:
    """Guaranteed lower bound ``rho / (n C + 1)`` on ``gamma`` of the perturbation,
    where ``C = max(1, max P / rho^N)``."""
    _require_rho(rho, P.space)
    prod = product_density(rho, P.arity).values
    C = max(1.0, float(np.max(P.values / prod)))
    return rho.values / (n * C + 1)


def clip_renormalize(P: SymmetricDensity, rho: SymmetricDensity, k: float) -> SymmetricDensity:
    """``min(P, k rho^N)`` rescaled to unit mass."""
    if k < 1:
        raise InvalidInput("clip level k must be >= 1")
    _require_rho(rho, P.space)
    prod = product_density(rho, P.arity).values
    clipped = SymmetricDensity(P.inner.with_values(np.minimum(P.values, k * prod)), False)
    return normalize(clipped)


def o_ell_member(P: SymmetricDensity, ell: float) -> bool:
    """``max P < ell`` and ``min P > 1 / ell``."""
    if ell < 1:
        raise InvalidInput("ell must be >= 1")
    return bool(P.values.max() < ell and P.values.min() > 1.0 / ell)


def expectation_identity_check(u: GridFunction, P: SymmetricDensity) -> tuple[float, float]:
    """``(integral G_{m,N}(u) P, integral u P_(m))``; on atomic spaces the two agree."""
    m, N = u.arity, P.arity
    if m > N:
        raise ArityError(f"kernel order {m} exceeds density arity {N}")
    if u.space != P.space:
        raise ShapeMismatch("kernel and density live on different spaces")
    lhs = integrate(g_mn(u, N), P.inner)
    Pm = P if m == N else reduce(P, m)
    rhs = integrate(u, Pm.inner)
    return lhs, rhs


# Names used by the interface description.
check_cond27 = check_section_bound
perturb_theorem14 = perturb_toward_product
