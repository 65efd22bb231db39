import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_kernel, random_space
from genmean import (
    ArityError,
    InvalidInput,
    NonPositiveRho,
    NotADensity,
    build_ex3,
    build_ex4,
    check_section_bound,
    clip_renormalize,
    constant,
    expectation_identity_check,
    l1_distance,
    make_density,
    make_space,
    normalize,
    o_ell_member,
    perturb_toward_product,
    product_density,
    random_symmetric_density,
    reduce,
    uniform_rho,
    uniform_space,
)
from genmean.densities import marginal, perturbation_gamma_floor

# dyadic weights and rho make the product and its reductions exact in binary
DYADIC = make_space(["a", "b", "c"], [0.25, 0.25, 0.5])
DYADIC_RHO = make_density(DYADIC, [1.0, 2.0, 0.5])


def test_invariants():
    s = uniform_space(2)
    with pytest.raises(NotADensity):
        make_density(s, [[1.0, -1.0], [-1.0, 1.0]], normalized=False)
    with pytest.raises(NotADensity):
        make_density(s, [[1.0, 2.0], [0.0, 1.0]], normalized=False)
    with pytest.raises(NotADensity):
        make_density(s, [[2.0, 2.0], [2.0, 2.0]], normalized=True)
    P = make_density(s, [[2.0, 2.0], [2.0, 2.0]])
    assert not P.normalized and P.mass == 2.0
    assert normalize(P).normalized
    flat = make_density(s, [1.0] * 8)
    assert flat.arity == 3


def test_unnormalized_ex3_admitted():
    _, P, _ = build_ex3(20)
    assert not P.normalized


def test_product_marginal_is_rho():
    P = product_density(DYADIC_RHO, 2)
    assert np.array_equal(reduce(P, 1).values, DYADIC_RHO.values)


def test_reduce_arity_guard(rng):
    P = random_symmetric_density(random_space(rng, 2), 3, rng)
    with pytest.raises(ArityError):
        reduce(P, 3)
    with pytest.raises(ArityError):
        reduce(P, 0)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_tower_exact(rng, N):
    P = random_symmetric_density(random_space(rng, 3), N, rng)
    for k in range(2, N):
        for ell in range(1, k):
            assert np.array_equal(reduce(reduce(P, k), ell).values, reduce(P, ell).values)


def test_reduction_independent_of_axes(rng):
    P = random_symmetric_density(random_space(rng, 3), 4, rng)
    ref = reduce(P, 1).values
    for keep in [(0,), (2,), (3,)]:
        assert np.allclose(marginal(P, keep), ref, rtol=1e-13, atol=0)
    ref2 = reduce(P, 2).values
    for keep in [(0, 1), (1, 3), (2, 0)]:
        assert np.allclose(marginal(P, keep), ref2, rtol=1e-13, atol=0)


def test_ex3_marginal_matches_direct_sum():
    _, P, _ = build_ex3(100)
    i = np.arange(1, 101)
    lam = []
    for a in i:
        terms = [(a + b) ** -2.0 if abs(a - b) == 1 else (a + b) ** -4.0 for b in i]
        lam.append(sum(sorted(terms)))
    assert np.allclose(reduce(P, 1).values, lam, rtol=1e-14, atol=0)


# -- condition check ----------------------------------------------------------


@pytest.mark.parametrize("N", [2, 3, 4])
def test_product_gamma_is_rho_exactly(N):
    rep = check_section_bound(product_density(DYADIC_RHO, N))
    assert rep.holds
    assert np.array_equal(rep.gamma, DYADIC_RHO.values)
    assert rep.B_atoms == (0, 1, 2)


def test_product_gamma_random_rho(rng):
    s = random_space(rng, 3)
    rho = normalize(make_density(s, rng.uniform(0.5, 2.0, 3), normalized=False))
    rep = check_section_bound(product_density(rho, 3))
    assert np.allclose(rep.gamma, rho.values, rtol=1e-12, atol=0)


@pytest.mark.parametrize("grid", [2, 4, 16, 128])
def test_ex4_fails(grid):
    P = build_ex4(grid)
    assert np.all(np.diag(P.values) == 0)
    assert np.all(reduce(P, 1).values > 0)
    rep = check_section_bound(P)
    assert not rep.holds
    assert np.all(rep.gamma == 0)
    assert rep.alpha is None and rep.beta is None


def test_two_atom_hand_constants():
    s = make_space(["a", "b"], [0.5, 0.5])
    rep = check_section_bound(product_density(uniform_rho(s), 2))
    assert rep.epsilon == 0.5
    assert rep.alpha == 2.0 and rep.beta == 2.0
    d = rep.to_dict()
    assert set(d) >= {"gamma", "B", "holds", "epsilon", "alpha", "beta"}


def test_alpha_at_least_one(rng):
    for N in (2, 3, 4):
        s = random_space(rng, 3)
        P = perturb_toward_product(random_symmetric_density(s, N, rng), uniform_rho(s), 10)
        rep = check_section_bound(P)
        assert rep.holds == bool(rep.B_atoms)
        assert rep.alpha >= 1.0


def test_check_needs_two_variables():
    with pytest.raises(ArityError):
        check_section_bound(uniform_rho(uniform_space(2)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(2, 3))
def test_gamma_propagates_to_reduction(seed, N, n):
    rng = np.random.default_rng(seed)
    s = random_space(rng, n)
    P = random_symmetric_density(s, N, rng, zero_fraction=0.3)
    P = perturb_toward_product(P, uniform_rho(s), 5) if seed % 2 else P
    rep = check_section_bound(P)
    if N == 2 or not rep.holds:
        return
    lower = check_section_bound(reduce(P, N - 1))
    assert np.all(lower.gamma >= rep.gamma * (1 - 1e-12))


# -- perturbations ------------------------------------------------------------


def test_perturb_n1_formula(rng):
    s = random_space(rng, 3)
    P = random_symmetric_density(s, 2, rng)
    rho = uniform_rho(s)
    P1 = perturb_toward_product(P, rho, 1)
    expected = (P.values + product_density(rho, 2).values) / 2
    assert np.allclose(P1.values, expected, rtol=1e-15)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_perturbations_pass_and_converge(rng, N):
    for _ in range(10):
        s = random_space(rng, 3)
        P = random_symmetric_density(s, N, rng, zero_fraction=0.5)
        rho = uniform_rho(s)
        dists = []
        for n in (1, 10, 100):
            Pn = perturb_toward_product(P, rho, n)
            assert Pn.normalized and np.all(Pn.values > 0)
            rep = check_section_bound(Pn)
            assert rep.holds
            assert np.all(rep.gamma >= perturbation_gamma_floor(P, rho, n) * (1 - 1e-12))
            dists.append(l1_distance(Pn, P))
        assert dists[0] > dists[1] > dists[2]
        assert dists[0] <= 2 / 2 + 1e-12


def test_perturb_guards(rng):
    s = random_space(rng, 2)
    P = random_symmetric_density(s, 2, rng)
    with pytest.raises(InvalidInput):
        perturb_toward_product(P, uniform_rho(s), 0)
    bad = make_density(s, [0.0, 1.0 / s.weights[1]])
    with pytest.raises(NonPositiveRho):
        perturb_toward_product(P, bad, 3)
    with pytest.raises(NotADensity):
        perturb_toward_product(make_density(s, np.full((2, 2), 3.0), normalized=False), uniform_rho(s), 3)


def test_clip_noop_and_guard(rng):
    s = uniform_space(2)
    P = product_density(uniform_rho(s), 2)
    assert np.allclose(clip_renormalize(P, uniform_rho(s), 1).values, P.values, rtol=1e-15)
    with pytest.raises(InvalidInput):
        clip_renormalize(P, uniform_rho(s), 0)


def test_clip_ex3_monotone():
    _, P, _ = build_ex3(50)
    P = normalize(P)
    rho = uniform_rho(P.space)
    d = [l1_distance(clip_renormalize(P, rho, k), P) for k in (1, 2, 4)]
    assert d[0] >= d[1] >= d[2]
    assert d[0] > d[2]


def test_o_ell():
    s = uniform_space(3)
    P = make_density(s, np.ones((3, 3)))
    assert o_ell_member(P, 2)
    Z = make_density(s, np.array([[0.0, 1.5, 1.5], [1.5, 0.0, 1.5], [1.5, 1.5, 0.0]]))
    assert not o_ell_member(Z, 100)
    rng = np.random.default_rng(5)
    Q = perturb_toward_product(random_symmetric_density(s, 3, rng), uniform_rho(s), 2)
    assert o_ell_member(Q, 50)
    assert check_section_bound(Q).B_atoms == (0, 1, 2)


# -- expectation identity -----------------------------------------------------


def test_expectation_identity_constant(rng):
    s = random_space(rng, 3)
    P = random_symmetric_density(s, 3, rng)
    lhs, rhs = expectation_identity_check(constant(s, 2, 1.75), P)
    assert lhs == pytest.approx(1.75, rel=1e-13) and rhs == pytest.approx(1.75, rel=1e-13)


def test_expectation_identity_random(rng):
    s = random_space(rng, 3)
    u = random_kernel(rng, s, 2)
    P = random_symmetric_density(s, 4, rng)
    lhs, rhs = expectation_identity_check(u, P)
    assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs))
    lhs, rhs = expectation_identity_check(random_kernel(rng, s, 4), P)
    assert lhs == rhs


def test_interface_aliases():
    import genmean

    assert genmean.check_cond27 is check_section_bound
    assert genmean.perturb_theorem14 is perturb_toward_product
