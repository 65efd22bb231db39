"""Generalized means and their inverse kernel operators.

``g_mn(u, N)`` averages a kernel ``u`` on ``Lambda^m`` over the ``C(N, m)``
strictly increasing slot tuples of ``N`` arguments. ``k_mn(U, m)`` recovers
the kernel from the mean by the recursion

    (N - m) K_{m,N}(U) = K_{m,N-1}( N U(., a) - G_{m-1,N-1}( K_{m-1,N}(
                           N G_{N-1,N}(U(., a)) - (N - m) U ) ) )

with base cases ``K_{m,m} = I`` and the explicit order-one formula in
:func:`k_1n`. Here ``a`` is an anchor atom fixing the last argument. On an
atomic space every anchor is admissible for an exact mean; the result does
not depend on the choice.

Neither ``u`` nor ``U`` has to be symmetric.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, InvalidInput, NotAGeneralizedMean, OrderMismatch
from .measure_space import GridFunction, check_budget, compensated_sum

#: Round-trip tolerances (relative, max norm) for order one and higher orders.
TOL_ORDER_ONE = 1e-9
TOL_HIGHER_ORDER = 1e-8


def default_tol(m: int) -> float:
    return TOL_ORDER_ONE if m == 1 else TOL_HIGHER_ORDER


@dataclass(frozen=True)
class AnchorSelection:
    """Atoms used to freeze arguments during kernel recovery.

    ``anchor_atoms[j - 2]`` is the frozen atom for argument ``j >= 2``
    (cycled when the list is shorter than needed). ``secondary_point`` is the
    base point ``(x_1, ..., x_N)`` of the order-one formula, also cycled.
    """

    anchor_atoms: tuple[int, ...] = (0,)
    secondary_point: tuple[int, ...] = (0,)

    def __post_init__(self):
        anchors = tuple(int(a) for a in self.anchor_atoms)
        point = tuple(int(a) for a in self.secondary_point)
        if not anchors or not point:
            raise InvalidInput("anchor lists must be nonempty")
        object.__setattr__(self, "anchor_atoms", anchors)
        object.__setattr__(self, "secondary_point", point)

    def tilde(self, j: int) -> int:
        """Frozen atom for argument ``j`` (1-based, ``j >= 2``)."""
        return self.anchor_atoms[(j - 2) % len(self.anchor_atoms)]

    def point(self, N: int) -> tuple[int, ...]:
        p = self.secondary_point
        return tuple(p[i % len(p)] for i in range(N))

    def validate(self, n: int):
        for a in self.anchor_atoms + self.secondary_point:
            if not 0 <= a < n:
                raise IndexOutOfRange(f"anchor atom {a} not in [0, {n})")

    @classmethod
    def random(cls, n: int, N: int, rng: np.random.Generator) -> "AnchorSelection":
        length = max(N, 1)
        return cls(
            tuple(int(a) for a in rng.integers(0, n, size=length)),
            tuple(int(a) for a in rng.integers(0, n, size=length)),
        )


DEFAULT_ANCHORS = AnchorSelection()


# -- array-level kernels ------------------------------------------------------


def gmean_array(u: np.ndarray, N: int) -> np.ndarray:
    """Generalized ``N``-mean of the kernel array ``u`` (shape ``(n,) * m``)."""
    m = u.ndim
    if N < m:
        raise OrderMismatch(f"N={N} is smaller than the kernel order m={m}")
    n = u.shape[0] if m else 1
    if m == N:
        return np.array(u, dtype=np.float64)
    check_budget(n, N)
    # Sum offsets from the first slot term so all-equal tuples average to
    # that value exactly; every entry is a convex combination of values of u,
    # so clipping to the range of u removes only round-off.
    terms = []
    for slots in itertools.combinations(range(N), m):
        shape = [1] * N
        for s in slots:
            shape[s] = n
        terms.append(u.reshape(shape))
    ref = np.broadcast_to(terms[0], (n,) * N)
    out = np.zeros((n,) * N)
    for t in terms[1:]:
        out += t - ref
    out = ref + out / math.comb(N, m)
    return np.clip(out, u.min(), u.max())


def _kernel_order_one(U: np.ndarray, anchors: AnchorSelection) -> np.ndarray:
    N = U.ndim
    if N == 1:
        return np.array(U, dtype=np.float64)
    frozen = tuple(anchors.tilde(j) for j in range(2, N + 1))
    section = U[(slice(None),) + frozen]
    point = anchors.point(N)
    # N * G_{1,N}(section) at the base point is the plain sum of the section there.
    shift = compensated_sum([U[point]] + [-section[x] for x in point])
    return N * section + shift


def kernel_array(U: np.ndarray, m: int, anchors: AnchorSelection = DEFAULT_ANCHORS) -> np.ndarray:
    """Unchecked kernel recovery on raw arrays; see :func:`k_mn`."""
    N = U.ndim
    if not 1 <= m <= N:
        raise OrderMismatch(f"order m={m} must satisfy 1 <= m <= N={N}")
    if m == N:
        return np.array(U, dtype=np.float64)
    if m == 1:
        return _kernel_order_one(U, anchors)
    section = U[..., anchors.tilde(N)]
    lowered = N * gmean_array(section, N) - (N - m) * U
    # ``lowered`` is a generalized N-mean of order m - 1 with kernel m * u(., a).
    partial = kernel_array(lowered, m - 1, anchors)
    shorter = N * section - gmean_array(partial, N - 1)
    # ``shorter`` is a generalized (N - 1)-mean of order m with kernel (N - m) * u.
    return kernel_array(shorter, m, anchors) / (N - m)


def relative_residual(reproduced: np.ndarray, target: np.ndarray) -> float:
    """Max-norm residual scaled by ``max|target|`` (absolute if target is 0)."""
    scale = float(np.max(np.abs(target))) if target.size else 0.0
    diff = float(np.max(np.abs(reproduced - target))) if target.size else 0.0
    return diff / scale if scale > 0 else diff


# -- GridFunction operators ---------------------------------------------------


def symmetrize(g: GridFunction) -> GridFunction:
    """Average of ``g`` over all permutations of its arguments."""
    m = g.arity
    check_budget(g.space.n, m)
    acc = np.zeros_like(g.values)
    for perm in itertools.permutations(range(m)):
        acc += np.transpose(g.values, perm)
    return g.with_values(acc / math.factorial(m))


def g_mn(u: GridFunction, N: int) -> GridFunction:
    """Generalized ``N``-mean with kernel ``u``, normalized by ``C(N, m)``."""
    N = int(N)
    if N < u.arity:
        raise OrderMismatch(f"N={N} is smaller than the kernel order m={u.arity}")
    return GridFunction(u.space, N, gmean_array(u.values, N))


@dataclass(frozen=True)
class KernelRecovery:
    """Recovered kernel together with its round-trip residual."""

    kernel: GridFunction
    residual: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.residual <= self.tol


def recover_kernel(
    U: GridFunction,
    m: int,
    anchors: AnchorSelection | None = None,
    tol: float | None = None,
) -> KernelRecovery:
    """Recover the order-``m`` kernel of ``U`` and measure ``|G(K(U)) - U|``.

    Never raises on a large residual; callers decide (see :func:`k_mn`).
    """
    anchors = anchors or DEFAULT_ANCHORS
    anchors.validate(U.space.n)
    m = int(m)
    if not 1 <= m <= U.arity:
        raise OrderMismatch(f"order m={m} must satisfy 1 <= m <= N={U.arity}")
    check_budget(U.space.n, U.arity)
    kernel = kernel_array(U.values, m, anchors)
    if m == U.arity:
        residual = 0.0
    else:
        residual = relative_residual(gmean_array(kernel, U.arity), U.values)
    return KernelRecovery(
        GridFunction(U.space, m, kernel),
        residual,
        default_tol(m) if tol is None else float(tol),
    )


def k_1n(U: GridFunction, anchors: AnchorSelection | None = None, tol: float | None = None) -> GridFunction:
    """Order-one kernel: ``u(x) = N U(x, a_2..a_N) + U(p) - N G_{1,N}(U(., a))(p)``.

    Raises :class:`NotAGeneralizedMean` when the round trip misses ``U`` by
    more than ``tol`` (default ``1e-9`` relative).
    """
    return k_mn(U, 1, anchors, tol)


def k_mn(
    U: GridFunction,
    m: int,
    anchors: AnchorSelection | None = None,
    tol: float | None = None,
) -> GridFunction:
    """Kernel of order ``m`` of the generalized mean ``U``.

    Raises :class:`NotAGeneralizedMean` when ``g_mn(result, N)`` differs from
    ``U`` by more than ``tol`` in relative max norm (default ``1e-9`` for
    ``m == 1``, ``1e-8`` otherwise).
    """
    rec = recover_kernel(U, m, anchors, tol)
    if not rec.ok:
        raise NotAGeneralizedMean(rec.residual, rec.tol)
    return rec.kernel


def is_generalized_mean(
    U: GridFunction, m: int, tol: float | None = None, anchors: AnchorSelection | None = None
) -> tuple[bool, float]:
    """Whether ``U`` lies in the range of ``G_{m,N}``, with the residual."""
    rec = recover_kernel(U, m, anchors, tol)
    return rec.ok, rec.residual


def is_symmetric(f: GridFunction | np.ndarray, rtol: float = 1e-12) -> bool:
    """Invariance under adjacent transpositions, which generate all permutations."""
    vals = getattr(f, "values", f)
    k = vals.ndim
    scale = max(float(np.max(np.abs(vals))), 1.0) if vals.size else 1.0
    for a in range(k - 1):
        if np.max(np.abs(vals - np.swapaxes(vals, a, a + 1))) > rtol * scale:
            return False
    return True
