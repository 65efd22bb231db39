"""Norms, bound constants for kernel recovery, and empirical checks of them.

Two constants bound the kernel in terms of its generalized mean:

* ``C(m, N)`` for the max norm, independent of any density;
* ``C_r(m, N, P)`` for ``L^r`` norms weighted by a symmetric density ``P``
  that satisfies the section lower bound of :func:`~genmean.densities.check_section_bound`.

Both are correct upper bounds, not tight ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .densities import (
    SymmetricDensity,
    check_section_bound,
    perturb_toward_product,
    random_symmetric_density,
    reduce,
    uniform_rho,
)
from .errors import BadExponent, SectionBoundFails, OrderMismatch, ShapeMismatch
from .measure_space import GridFunction, integrate, make_space
from .operators import AnchorSelection, g_mn, k_mn, relative_residual

INF = math.inf
#: Relative slack allowed when comparing a norm against its bound.
COMPARE_RTOL = 1e-12


def _check_exponent(r: float):
    if not (r >= 1):
        raise BadExponent(f"exponent r={r} must be >= 1")


def lr_norm(f: GridFunction, Q: SymmetricDensity | GridFunction | None = None, r: float = 2.0) -> float:
    """``(integral |f|^r Q d^k x)^(1/r)``; ``r = inf`` gives the max over atoms.

    ``Q=None`` means the bare product measure.
    """
    _check_exponent(r)
    if r == INF:
        return float(np.max(np.abs(f.values)))
    if Q is not None:
        Qi = getattr(Q, "inner", Q)
        if Qi.space != f.space or Qi.arity != f.arity:
            raise ShapeMismatch("function and density differ in space or arity")
    powered = f.with_values(np.abs(f.values) ** r)
    return integrate(powered, Q) ** (1.0 / r)


def ess_bounds(f: GridFunction) -> tuple[float, float]:
    """(ess inf, ess sup); on atoms of positive weight these are min and max."""
    return float(f.values.min()), float(f.values.max())


@lru_cache(maxsize=None)
def _c_inf_exact(m: int, N: int) -> Fraction:
    if m == N or m == 1:
        return Fraction(1)
    return _c_inf_exact(m, N - 1) / (N - m) * (N + (2 * N - m) * _c_inf_exact(m - 1, N))


def c_inf_bound(m: int, N: int) -> float:
    """Max-norm constant: ``C(m,m) = C(1,N) = 1`` and
    ``C(m,N) = C(m,N-1) / (N-m) * (N + (2N-m) C(m-1,N))``."""
    if not 1 <= m <= N:
        raise OrderMismatch(f"need 1 <= m <= N, got m={m}, N={N}")
    return float(_c_inf_exact(int(m), int(N)))


def c_r_bound(m: int, N: int, P: SymmetricDensity, r: float) -> float:
    """``L^r`` constant for recovering an order-``m`` kernel from ``U`` in ``L^r(P)``.

    ``alpha`` and ``beta`` are recomputed on every reduction ``P_(N-1),
    P_(N-2), ...`` that the recursion visits. Raises :class:`SectionBoundFails` if
    any visited level violates the section lower bound.
    """
    _check_exponent(r)
    if r == INF:
        raise BadExponent("use c_inf_bound for the max norm")
    if P.arity != N:
        raise ShapeMismatch(f"density has arity {P.arity}, expected N={N}")
    if not 1 <= m <= N:
        raise OrderMismatch(f"need 1 <= m <= N, got m={m}, N={N}")
    levels = {N: P}
    reports = {}

    def level(k):
        if k not in levels:
            levels[k] = reduce(P, k)
        return levels[k]

    def report(k):
        if k not in reports:
            rep = check_section_bound(level(k))
            if not rep.holds:
                raise SectionBoundFails(f"section lower bound fails for the {k}-variable density")
            reports[k] = rep
        return reports[k]

    @lru_cache(maxsize=None)
    def c(mm, NN):
        if mm == NN:
            return 1.0
        rep = report(NN)
        if mm == 1:
            return 2 * NN * rep.alpha ** (1.0 / r) + 1
        b = NN * rep.beta ** (1.0 / r)
        return c(mm, NN - 1) / (NN - mm) * (b + c(mm - 1, NN) * (b + (NN - mm)))

    return c(int(m), int(N))


@dataclass
class BoundTable:
    """Constants for every ``1 <= m <= N' <= N``.

    ``c_r[(m, N')]`` is computed for the reduction ``P_(N')``; ``alpha`` and
    ``beta`` are those of ``P`` itself.
    """

    c_inf: dict = field(default_factory=dict)
    c_r: dict = field(default_factory=dict)
    r: float | None = None
    alpha: float | None = None
    beta: float | None = None

    def to_dict(self) -> dict:
        key = lambda mn: f"{mn[0]},{mn[1]}"
        return {
            "c_inf": {key(k): v for k, v in sorted(self.c_inf.items())},
            "c_r": {key(k): v for k, v in sorted(self.c_r.items())},
            "r": self.r,
            "alpha": self.alpha,
            "beta": self.beta,
        }


def bound_table(N: int, P: SymmetricDensity | None = None, r: float | None = None) -> BoundTable:
    table = BoundTable(r=r)
    for NN in range(1, N + 1):
        for m in range(1, NN + 1):
            table.c_inf[(m, NN)] = c_inf_bound(m, NN)
    if P is not None and r is not None and r != INF:
        if P.arity != N:
            raise ShapeMismatch(f"density has arity {P.arity}, expected N={N}")
        if N >= 2:
            rep = check_section_bound(P)
            table.alpha, table.beta = rep.alpha, rep.beta
        for NN in range(1, N + 1):
            PN = P if NN == N else reduce(P, NN)
            for m in range(1, NN + 1):
                table.c_r[(m, NN)] = c_r_bound(m, NN, PN, r)
    return table


@dataclass(frozen=True)
class BoundsReport:
    """One instance of ``u -> U = G(u) -> K(U)`` checked against both bounds."""

    m: int
    N: int
    r: float
    norm_kernel: float
    norm_mean: float
    norm_recovered: float
    constant: float
    recovery_error: float
    forward_ok: bool
    inverse_ok: bool
    recovery_ok: bool

    @property
    def ok(self) -> bool:
        return self.forward_ok and self.inverse_ok and self.recovery_ok

    @property
    def forward_margin(self) -> float:
        return self.norm_kernel - self.norm_mean

    @property
    def inverse_margin(self) -> float:
        return self.constant * self.norm_mean - self.norm_recovered

    @property
    def ratio(self) -> float:
        return self.norm_recovered / self.norm_mean if self.norm_mean > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "N": self.N,
            "r": "inf" if self.r == INF else self.r,
            "norms": {
                "kernel": self.norm_kernel,
                "mean": self.norm_mean,
                "recovered": self.norm_recovered,
            },
            "constant": self.constant,
            "margins": {"forward": self.forward_margin, "inverse": self.inverse_margin},
            "ratio": self.ratio,
            "recovery_error": self.recovery_error,
            "ok": self.ok,
        }


def _leq(a: float, b: float) -> bool:
    return a <= b + COMPARE_RTOL * max(abs(a), abs(b), 1e-300)


def verify_bounds(
    u: GridFunction,
    N: int,
    P: SymmetricDensity | None = None,
    r: float = INF,
    anchors: AnchorSelection | None = None,
    constant: float | None = None,
) -> BoundsReport:
    """Check ``|G(u)| <= |u|``, ``|K(U)| <= C |U|`` and ``K(G(u)) == u``.

    For ``r = inf`` the norms are plain max norms and ``C = C(m, N)``; for
    finite ``r`` the mean is measured in ``L^r(P)``, the kernels in
    ``L^r(P_(m))`` and ``C = C_r(m, N, P)``. A precomputed ``constant`` may
    be passed to skip the recursion.
    """
    _check_exponent(r)
    m = u.arity
    U = g_mn(u, N)
    recovered = k_mn(U, m, anchors)
    if r == INF:
        norm_u = lr_norm(u, r=INF)
        norm_U = lr_norm(U, r=INF)
        norm_rec = lr_norm(recovered, r=INF)
        C = c_inf_bound(m, N) if constant is None else constant
    else:
        if P is None:
            raise ShapeMismatch("a density is required for finite r")
        Pm = P if m == N else reduce(P, m)
        norm_u = lr_norm(u, Pm, r)
        norm_U = lr_norm(U, P, r)
        norm_rec = lr_norm(recovered, Pm, r)
        C = c_r_bound(m, N, P, r) if constant is None else constant
    err = relative_residual(recovered.values, u.values)
    tol = 1e-9 if m == 1 else 1e-8
    return BoundsReport(
        m, N, r, norm_u, norm_U, norm_rec, C, err,
        forward_ok=_leq(norm_U, norm_u),
        inverse_ok=_leq(norm_rec, C * norm_U),
        recovery_ok=err <= tol,
    )


def random_bounds_suite(
    instances: int = 100,
    seed: int = 0,
    max_N: int = 4,
    max_m: int = 3,
    n_atoms: tuple[int, ...] = (2, 3),
    rs: tuple[float, ...] = (1.0, 2.0, INF),
    perturbation: int = 10,
) -> dict:
    """Randomized verification over kernels, densities and exponents.

    Densities are random symmetric densities pushed through
    :func:`~genmean.densities.perturb_toward_product` with uniform ``rho``, so the
    section lower bound always holds. The seed is recorded in the report.
    """
    rng = np.random.default_rng(seed)
    pairs = [(m, N) for N in range(1, max_N + 1) for m in range(1, min(N, max_m) + 1)]
    reports = []
    for idx in range(instances):
        m, N = pairs[idx % len(pairs)]
        n = int(n_atoms[rng.integers(len(n_atoms))])
        r = rs[int(rng.integers(len(rs)))]
        space = make_space([f"x{i}" for i in range(n)], rng.uniform(0.2, 1.0, size=n))
        u = GridFunction(space, m, rng.standard_normal((n,) * m))
        P = None
        if r != INF and N >= 2:
            P = perturb_toward_product(random_symmetric_density(space, N, rng), uniform_rho(space), perturbation)
        elif r != INF:
            P = uniform_rho(space)
        reports.append(verify_bounds(u, N, P, r))
    return {
        "seed": seed,
        "instances": instances,
        "all_ok": all(rep.ok for rep in reports),
        "constants": [
            {"m": rep.m, "N": rep.N, "r": rep.to_dict()["r"], "constant": rep.constant} for rep in reports
        ],
        "norms": [rep.to_dict()["norms"] for rep in reports],
        "margins": [rep.to_dict()["margins"] for rep in reports],
        "max_ratio_over_constant": max(rep.ratio / rep.constant for rep in reports),
    }
