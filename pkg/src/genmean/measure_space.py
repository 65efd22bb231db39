"""Finite atomic measure spaces and grid functions on their product powers.

A :class:`MeasureSpace` is a finite list of labelled atoms with strictly
positive weights. A function on ``Lambda^k`` is a :class:`GridFunction`
holding a ``k``-dimensional array of shape ``(n,) * k``; flattening is
row-major, so the multi-index ``(i_1, ..., i_k)`` maps to
``sum_j i_j * n**(k - j)``.

Every null set of an atomic space with positive weights is empty, so
"almost everywhere" statements become exact statements about arrays.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    DuplicateLabel,
    EmptySpace,
    IndexOutOfRange,
    InvalidInput,
    NonPositiveWeight,
    ShapeMismatch,
)

DEFAULT_BUDGET = 10**7
BUDGET_ENV = "GENMEAN_BUDGET"

_budget_override: contextvars.ContextVar[int | None] = contextvars.ContextVar(
    "genmean_budget", default=None
)


def get_budget() -> int:
    """Current maximum number of entries any single grid may hold.

    Resolution order: an active :func:`entry_budget` scope, then the
    ``GENMEAN_BUDGET`` environment variable, then ``10**7``.
    """
    override = _budget_override.get()
    if override is not None:
        return override
    env = os.environ.get(BUDGET_ENV)
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise InvalidInput(f"{BUDGET_ENV}={env!r} is not an integer") from exc
        if value < 1:
            raise InvalidInput(f"{BUDGET_ENV} must be >= 1")
        return value
    return DEFAULT_BUDGET


@contextlib.contextmanager
def entry_budget(budget: int):
    """Temporarily set the grid entry budget for the current context."""
    if budget < 1:
        raise InvalidInput("budget must be >= 1")
    token = _budget_override.set(int(budget))
    try:
        yield
    finally:
        _budget_override.reset(token)


def check_budget(n_atoms: int, arity: int) -> int:
    """Raise :class:`BudgetExceeded` if ``n_atoms**arity`` is over budget."""
    entries = n_atoms**arity
    budget = get_budget()
    if entries > budget:
        raise BudgetExceeded(entries, budget)
    return entries


def compensated_sum(values) -> float:
    """Correctly rounded sum of all entries, independent of iteration order.

    Uses :func:`math.fsum`, so the result does not depend on how the input was
    chunked or in which order partial results were produced.
    """
    return math.fsum(np.ravel(np.asarray(values, dtype=np.float64)).tolist())


def contract_last(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Weighted sum over the last axis with Neumaier compensation.

    The loop runs over the last axis in increasing index order and is
    vectorized across the remaining axes, so the result is deterministic.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.shape[-1] != len(weights):
        raise ShapeMismatch("last axis does not match the weight vector")
    total = np.zeros(values.shape[:-1])
    comp = np.zeros_like(total)
    for idx, w in enumerate(weights):
        term = values[..., idx] * w
        t = total + term
        big = np.abs(total) >= np.abs(term)
        comp += np.where(big, (total - t) + term, (term - t) + total)
        total = t
    return total + comp


def flatten_index(multi_index: Sequence[int], n: int) -> int:
    """Row-major position of ``multi_index`` in a grid with ``n`` atoms per axis."""
    flat = 0
    for i in multi_index:
        if not 0 <= i < n:
            raise IndexOutOfRange(f"atom index {i} not in [0, {n})")
        flat = flat * n + int(i)
    return flat


def unflatten_index(flat: int, n: int, arity: int) -> tuple[int, ...]:
    """Inverse of :func:`flatten_index`."""
    if not 0 <= flat < n**arity:
        raise IndexOutOfRange(f"flat index {flat} not in [0, {n**arity})")
    out = []
    for _ in range(arity):
        flat, rem = divmod(flat, n)
        out.append(rem)
    return tuple(reversed(out))


@dataclass(frozen=True, eq=False)
class MeasureSpace:
    """Finite set of labelled atoms with strictly positive weights."""

    atoms: tuple[str, ...]
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        atoms = tuple(str(a) for a in self.atoms)
        weights = np.array(self.weights, dtype=np.float64).ravel()
        if not atoms:
            raise EmptySpace("a measure space needs at least one atom")
        if len(weights) != len(atoms):
            raise ShapeMismatch(
                f"{len(atoms)} labels but {len(weights)} weights"
            )
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise NonPositiveWeight("all atom weights must be finite and > 0")
        if len(set(atoms)) != len(atoms):
            raise DuplicateLabel("atom labels must be unique")
        weights.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return len(self.atoms)

    @property
    def total_mass(self) -> float:
        return compensated_sum(self.weights)

    def index(self, label: str) -> int:
        try:
            return self.atoms.index(label)
        except ValueError:
            raise IndexOutOfRange(f"no atom labelled {label!r}") from None

    def product_weights(self, arity: int) -> np.ndarray:
        """Grid of product weights ``w[i_1] * ... * w[i_k]`` on ``Lambda^k``."""
        check_budget(self.n, arity)
        grid = np.ones(())
        for _ in range(arity):
            grid = np.multiply.outer(grid, self.weights)
        return grid

    def __eq__(self, other):
        return (
            isinstance(other, MeasureSpace)
            and self.atoms == other.atoms
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash((self.atoms, self.weights.tobytes()))


def make_space(labels: Sequence[str], weights: Iterable[float]) -> MeasureSpace:
    """Build a :class:`MeasureSpace`; total mass need not be 1."""
    return MeasureSpace(tuple(labels), np.asarray(list(weights), dtype=np.float64))


def uniform_space(n: int, mass: float = 1.0, prefix: str = "x") -> MeasureSpace:
    """``n`` atoms of equal weight ``mass / n`` labelled ``x0, x1, ...``."""
    return make_space([f"{prefix}{i}" for i in range(n)], [mass / n] * n)


def product_weight(space: MeasureSpace, multi_index: Sequence[int]) -> float:
    """Product measure of the single atom ``multi_index`` of ``Lambda^k``."""
    out = 1.0
    for i in multi_index:
        if not 0 <= i < space.n:
            raise IndexOutOfRange(f"atom index {i} not in [0, {space.n})")
        out *= float(space.weights[i])
    return out


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real function on ``Lambda^k`` stored as an array of shape ``(n,) * k``.

    ``values`` may be given flat (length ``n**k``, row-major) or already
    shaped. The stored array is read-only.
    """

    space: MeasureSpace
    arity: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        k = int(self.arity)
        if k < 1:
            raise InvalidInput("arity must be >= 1")
        n = self.space.n
        check_budget(n, k)
        vals = np.array(self.values, dtype=np.float64)
        if vals.size != n**k:
            raise ShapeMismatch(f"expected {n**k} values for arity {k}, got {vals.size}")
        vals = vals.reshape((n,) * k)
        if not np.all(np.isfinite(vals)):
            raise InvalidInput("grid function values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "arity", k)
        object.__setattr__(self, "values", vals)

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def __call__(self, *multi_index: int) -> float:
        if len(multi_index) != self.arity:
            raise ShapeMismatch(f"expected {self.arity} indices")
        for i in multi_index:
            if not 0 <= i < self.space.n:
                raise IndexOutOfRange(f"atom index {i} not in [0, {self.space.n})")
        return float(self.values[multi_index])

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.space, self.arity, values)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _require_same(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _require_same(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar: float) -> "GridFunction":
        return self.with_values(self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return self.with_values(-self.values)


def _require_same(f: GridFunction, g: GridFunction):
    if f.space != g.space or f.arity != g.arity:
        raise ShapeMismatch("grid functions live on different spaces or arities")


def constant(space: MeasureSpace, arity: int, c: float) -> GridFunction:
    check_budget(space.n, arity)
    return GridFunction(space, arity, np.full((space.n,) * arity, float(c)))


def integrate(f: GridFunction, Q: GridFunction | None = None) -> float:
    """Integral of ``f`` (times the density factor ``Q``) against ``d^k x``.

    The sum runs over every atom of ``Lambda^k`` and is correctly rounded.
    """
    terms = f.values * f.space.product_weights(f.arity)
    if Q is not None:
        Q = getattr(Q, "inner", Q)
        _require_same(f, Q)
        terms = terms * Q.values
    return compensated_sum(terms)
