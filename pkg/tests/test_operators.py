import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_kernel, random_space
from genmean import (
    AnchorSelection,
    GridFunction,
    IndexOutOfRange,
    NotAGeneralizedMean,
    OrderMismatch,
    constant,
    g_mn,
    is_generalized_mean,
    k_1n,
    k_mn,
    make_space,
    recover_kernel,
    symmetrize,
    uniform_space,
)
from genmean.operators import gmean_array, is_symmetric, relative_residual

AB = make_space(["a", "b"], [0.5, 0.5])


def brute_gmean(u, N):
    """Average of u over all increasing slot tuples, one atom at a time."""
    n, m = u.shape[0], u.ndim
    out = np.empty((n,) * N)
    slots = list(itertools.combinations(range(N), m))
    for x in itertools.product(range(n), repeat=N):
        out[x] = math.fsum(u[tuple(x[s] for s in sl)] for sl in slots) / len(slots)
    return out


# -- symmetrize ---------------------------------------------------------------


def test_symmetrize_two_term_average():
    g = GridFunction(AB, 2, [1.0, 2.0, 0.0, 5.0])
    u = symmetrize(g)
    assert u(0, 1) == u(1, 0) == 1.0
    assert u(0, 0) == 1.0 and u(1, 1) == 5.0


def test_symmetrize_fixes_symmetric_input(rng):
    s = random_space(rng, 3)
    u = symmetrize(random_kernel(rng, s, 3))
    assert np.allclose(symmetrize(u).values, u.values, rtol=1e-12, atol=0)


def test_symmetrize_matches_permutation_brute_force(rng):
    s = random_space(rng, 3)
    g = random_kernel(rng, s, 3)
    expected = np.empty((3, 3, 3))
    for idx in itertools.product(range(3), repeat=3):
        expected[idx] = math.fsum(g.values[tuple(idx[p] for p in perm)] for perm in itertools.permutations(range(3))) / 6
    assert np.allclose(symmetrize(g).values, expected, rtol=1e-14, atol=1e-15)
    assert is_symmetric(symmetrize(g))


# -- forward mean -------------------------------------------------------------


def test_g_mn_order_one():
    u = GridFunction(AB, 1, [0.0, 2.0])
    U = g_mn(u, 2)
    assert U(0, 0) == 0.0 and U(0, 1) == U(1, 0) == 1.0 and U(1, 1) == 2.0


def test_g_mn_order_two_hand_value():
    u = GridFunction(AB, 2, [1.0, 2.0, 2.0, 5.0])
    assert g_mn(u, 3)(0, 0, 1) == pytest.approx(5 / 3, rel=1e-15)


def test_g_mn_identity_when_m_equals_n(rng):
    u = random_kernel(rng, random_space(rng, 3), 2)
    assert np.array_equal(g_mn(u, 2).values, u.values)


def test_g_mn_rejects_bad_order(rng):
    u = random_kernel(rng, random_space(rng, 2), 3)
    with pytest.raises(OrderMismatch):
        g_mn(u, 2)


@pytest.mark.parametrize("m,N", [(1, 3), (2, 3), (2, 4), (3, 4), (1, 5), (3, 5)])
def test_g_mn_matches_brute_force(rng, m, N):
    # non-symmetric kernels too: the mean uses slots in increasing order
    u = rng.standard_normal((3,) * m)
    assert np.allclose(gmean_array(u, N), brute_gmean(u, N), rtol=1e-13, atol=1e-14)


# -- kernels ------------------------------------------------------------------


def test_k_1n_recovers_arithmetic_mean_kernel():
    u = GridFunction(AB, 1, [0.0, 2.0])
    U = g_mn(u, 2)
    for anchors in [None, AnchorSelection((1,), (1,)), AnchorSelection((0, 1), (1, 0))]:
        assert np.allclose(k_1n(U, anchors).values, u.values, atol=1e-15)


def test_constant_is_fixed_point():
    s = uniform_space(3)
    for m, N in [(1, 3), (2, 4)]:
        rec = k_mn(constant(s, N, 4.25), m)
        assert np.allclose(rec.values, 4.25, rtol=1e-14)


def test_k_1n_round_trip_four_atoms(rng):
    u = random_kernel(rng, random_space(rng, 4), 1)
    assert relative_residual(k_1n(g_mn(u, 3)).values, u.values) <= 1e-9


def test_k_mn_identity_case(rng):
    U = random_kernel(rng, random_space(rng, 3), 3)
    assert np.array_equal(k_mn(U, 3).values, U.values)


def test_k_mn_order_two_hand_instance():
    u = GridFunction(AB, 2, [1.0, 2.0, 2.0, 5.0])
    assert np.allclose(k_mn(g_mn(u, 3), 2).values, u.values, rtol=1e-12)


@pytest.mark.parametrize("m,N", [(2, 4), (3, 5)])
def test_k_mn_round_trip_symmetric(rng, m, N):
    u = random_kernel(rng, random_space(rng, 3), m, symmetric=True)
    assert relative_residual(k_mn(g_mn(u, N), m).values, u.values) <= 1e-8


def test_k_mn_non_mean_raises_with_residual():
    vals = np.zeros((2, 2, 2))
    vals[0, 0, 0] = 1.0
    U = GridFunction(AB, 3, vals)
    with pytest.raises(NotAGeneralizedMean) as info:
        k_mn(U, 1)
    assert info.value.residual > 1e-8
    rec = recover_kernel(U, 1)
    assert not rec.ok and rec.residual == info.value.residual


def test_is_generalized_mean_cases(rng):
    u = random_kernel(rng, random_space(rng, 3), 2)
    ok, res = is_generalized_mean(g_mn(u, 3), 2, tol=1e-8)
    assert ok and res < 1e-8
    vals = np.zeros((2, 2, 2))
    vals[0, 0, 0] = 1.0
    ok, res = is_generalized_mean(GridFunction(AB, 3, vals), 1, tol=1e-8)
    assert not ok and res > 1e-8
    ok, res = is_generalized_mean(GridFunction(AB, 3, vals), 3)
    assert ok and res == 0.0


def test_anchor_validation(rng):
    U = g_mn(random_kernel(rng, random_space(rng, 2), 1), 2)
    with pytest.raises(IndexOutOfRange):
        k_mn(U, 1, AnchorSelection((5,), (0,)))
    with pytest.raises(ValueError):
        AnchorSelection((), (0,))
    sel = AnchorSelection((1, 2), (0,))
    assert [sel.tilde(j) for j in range(2, 6)] == [1, 2, 1, 2]
    assert sel.point(3) == (0, 0, 0)


def test_order_guard(rng):
    U = g_mn(random_kernel(rng, random_space(rng, 2), 1), 2)
    with pytest.raises(OrderMismatch):
        k_mn(U, 3)
    with pytest.raises(OrderMismatch):
        k_mn(U, 0)


# -- properties ---------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(
    st.integers(2, 4).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.integers(1, 3).flatmap(
                lambda m: st.tuples(st.just(m), st.integers(m, 4), arrays(np.float64, (n,) * m, elements=st.floats(-1e3, 1e3)))
            ),
        )
    )
)
def test_round_trip_property(data):
    n, (m, N, vals) = data
    u = GridFunction(uniform_space(n), m, vals)
    rec = k_mn(g_mn(u, N), m)
    scale = max(np.max(np.abs(vals)), 1.0)
    assert np.max(np.abs(rec.values - vals)) <= 1e-8 * scale


def test_symmetry_preserved_both_ways(rng):
    s = random_space(rng, 3)
    for m, N in [(1, 3), (2, 3), (2, 4), (3, 4)]:
        u = random_kernel(rng, s, m, symmetric=True)
        U = g_mn(u, N)
        assert is_symmetric(U)
        assert is_symmetric(k_mn(U, m))


def test_linearity(rng):
    s = random_space(rng, 3)
    for m, N in [(1, 2), (2, 4), (3, 5)]:
        u, v = random_kernel(rng, s, m), random_kernel(rng, s, m)
        a, b = rng.standard_normal(2)
        lhs = g_mn(a * u + b * v, N).values
        rhs = (a * g_mn(u, N) + b * g_mn(v, N)).values
        assert relative_residual(lhs, rhs) <= 1e-10
        U, V = g_mn(u, N), g_mn(v, N)
        lhs = k_mn(a * U + b * V, m).values
        rhs = (a * k_mn(U, m) + b * k_mn(V, m)).values
        assert relative_residual(lhs, rhs) <= 1e-10


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sequence_convergence_both_directions(rng, n):
    s = random_space(rng, n)
    u = random_kernel(rng, s, 2)
    U = g_mn(u, 3)
    errs_fwd, errs_inv = [], []
    for step in range(1, 6):
        h = 10.0**-step
        du = random_kernel(rng, s, 2) * h
        errs_fwd.append(np.max(np.abs(g_mn(u + du, 3).values - U.values)))
        errs_inv.append(np.max(np.abs(k_mn(g_mn(u + du, 3), 2).values - u.values)))
    assert all(b < a for a, b in zip(errs_fwd, errs_fwd[1:]))
    assert all(b < a for a, b in zip(errs_inv, errs_inv[1:]))
    assert errs_fwd[-1] < 1e-4 and errs_inv[-1] < 1e-4


def test_all_equal_tuples_average_exactly():
    # 0.1 + 0.1 + 0.1 != 0.3 in binary; the mean must still return 0.1
    u = GridFunction(AB, 1, [0.1, 0.7])
    U = g_mn(u, 3)
    assert U(0, 0, 0) == 0.1 and U(1, 1, 1) == 0.7


@settings(max_examples=100, deadline=None)
@given(
    arrays(np.float64, st.integers(1, 4), elements=st.floats(-1e6, 1e6)),
    st.integers(1, 5),
)
def test_order_one_mean_keeps_range_exactly(vals, N):
    s = uniform_space(vals.size)
    u = GridFunction(s, 1, vals)
    U = g_mn(u, N)
    assert (U.values.min(), U.values.max()) == (vals.min(), vals.max())
