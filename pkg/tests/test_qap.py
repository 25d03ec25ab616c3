import numpy as np
import pytest
from hypothesis import given, strategies as st

from simplexmatch.graph_models import derive_seed, make_rng, sample_cgw, sample_goe
from simplexmatch.qap import (
    EnergyContext,
    efficiency_ratio,
    energy,
    energy_and_gradient,
    gradient,
    kron_hessian,
    lipschitz_estimates,
    population_gradient,
)

seeds = st.integers(0, 2**32)


def _pair(n, seed, sigma=0.7):
    A, B = sample_cgw(n, sigma, np.arange(n), seed)
    return A, B


def _simplex_point(rng, n):
    X = rng.random((n, n))
    return X / X.sum()


def _vec(X):
    return X.reshape(-1, order="F")


# ---------------------------------------------------------------- context


def test_context_caches_squares_and_is_read_only():
    A, B = _pair(6, 1)
    ctx = EnergyContext(A, B)
    assert np.allclose(ctx.A2, A @ A, rtol=1e-12, atol=0)
    assert np.allclose(ctx.B2, B @ B, rtol=1e-12, atol=0)
    with pytest.raises(ValueError):
        ctx.A[0, 0] = 1.0


def test_context_validates_shapes():
    with pytest.raises(ValueError):
        EnergyContext(np.zeros((2, 3)), np.zeros((2, 3)))
    with pytest.raises(ValueError):
        EnergyContext(np.zeros((2, 2)), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        EnergyContext(np.array([[np.nan]]), np.zeros((1, 1)))
    ctx = EnergyContext(np.eye(2), np.eye(2))
    with pytest.raises(ValueError):
        energy(ctx, np.eye(3))
    with pytest.raises(ValueError):
        gradient(ctx, np.eye(3))


# ---------------------------------------------------------------- energy


def test_energy_commuting_is_zero():
    A = sample_goe(5, 2)
    assert energy(EnergyContext(A, A), np.eye(5)) == 0.0


def test_energy_hand_case():
    A = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert energy(EnergyContext(A, np.zeros((2, 2))), np.eye(2)) == 2.0


@given(st.integers(1, 8), seeds)
def test_energy_matches_kronecker_form(n, seed):
    A, B = _pair(n, seed)
    X = make_rng(seed).standard_normal((n, n))
    I = np.eye(n)
    L = np.kron(I, A) - np.kron(B, I)
    H = L @ L
    v = _vec(X)
    ref = v @ H @ v
    e = energy(EnergyContext(A, B), X)
    assert abs(e - ref) <= 1e-10 * max(1.0, abs(ref))
    assert np.allclose(kron_hessian(A, B), H, atol=1e-12)


def test_kron_hessian_size_limit():
    with pytest.raises(ValueError):
        kron_hessian(np.eye(9), np.eye(9))


@given(st.integers(1, 10), seeds)
def test_energy_nonnegative_and_zero_iff_commuting(n, seed):
    A, B = _pair(n, seed)
    X = make_rng(seed).standard_normal((n, n))
    ctx = EnergyContext(A, B)
    assert energy(ctx, X) >= 0
    assert energy(EnergyContext(A, A), np.eye(n)) == 0.0


# ---------------------------------------------------------------- gradient


@pytest.mark.parametrize("seed", range(5))
def test_gradient_finite_differences(seed):
    # gradient() is half the Euclidean gradient of the energy
    n, h = 5, 1e-5
    A, B = _pair(n, seed)
    ctx = EnergyContext(A, B)
    X = _simplex_point(make_rng(seed), n)
    G = gradient(ctx, X)
    fd = np.empty_like(X)
    for i in range(n):
        for j in range(n):
            E = np.zeros_like(X)
            E[i, j] = h
            fd[i, j] = (energy(ctx, X + E) - energy(ctx, X - E)) / (2 * h)
    rel = np.abs(fd - 2 * G) / np.maximum(np.abs(2 * G), 1e-300)
    assert rel.max() < 1e-6


@given(st.integers(1, 10), seeds)
def test_energy_and_gradient_agree(n, seed):
    A, B = _pair(n, seed)
    ctx = EnergyContext(A, B)
    X = make_rng(seed).standard_normal((n, n))
    e, G = energy_and_gradient(ctx, X)
    assert e == pytest.approx(energy(ctx, X), rel=1e-12, abs=1e-14)
    assert np.allclose(G, gradient(ctx, X), rtol=1e-10, atol=1e-12)


@given(st.integers(1, 10), seeds, st.floats(-3, 3), st.floats(-3, 3))
def test_gradient_linear(n, seed, a, b):
    A, B = _pair(n, seed)
    ctx = EnergyContext(A, B)
    rng = make_rng(seed)
    X = rng.standard_normal((n, n))
    Y = rng.standard_normal((n, n))
    lhs = gradient(ctx, a * X + b * Y)
    rhs = a * gradient(ctx, X) + b * gradient(ctx, Y)
    scale = max(1.0, np.abs(lhs).max())
    assert np.abs(lhs - rhs).max() <= 1e-12 * scale * 10


@given(st.integers(1, 10), seeds)
def test_gradient_symmetric_inputs_give_symmetric_output(n, seed):
    A = sample_goe(n, seed)
    X = make_rng(seed).standard_normal((n, n))
    X = X + X.T
    G = gradient(EnergyContext(A, A), X)
    assert np.allclose(G, G.T, rtol=0, atol=1e-12 * max(1.0, np.abs(G).max()))


@pytest.mark.parametrize("seed", range(5))
def test_gradient_at_ones_noiseless(seed):
    n = 12
    A = sample_goe(n, seed)
    G = gradient(EnergyContext(A, A), np.ones((n, n)))
    s = A.sum(axis=0)
    d = np.diag(G)
    lhs = d[:, None] + d[None, :] - 2 * G
    rhs = -2.0 * (s[:, None] - s[None, :]) ** 2
    off = ~np.eye(n, dtype=bool)
    assert np.allclose(lhs[off], rhs[off], atol=1e-12)
    # distinct column sums: strictly negative, so -G satisfies the sum condition
    assert np.all(lhs[off] < 0)


# ---------------------------------------------------------------- population gradient


def test_population_gradient_at_barycenter():
    for n, sigma in [(3, 0.0), (10, 0.5), (40, 1.3)]:
        X = np.full((n, n), 1.0 / n**2)
        ref = (1.0 / n**2) * ((2 + (n + 1) / n * sigma**2) * np.ones((n, n)) - 2 * np.eye(n))
        assert np.allclose(population_gradient(X, sigma), ref, atol=1e-15)


@given(st.integers(1, 40))
def test_population_gradient_stationary_at_identity(n):
    G = population_gradient(np.eye(n) / n, 0.0)
    assert np.allclose(G, 0.0, atol=1e-15)


def test_population_gradient_requires_square():
    with pytest.raises(ValueError):
        population_gradient(np.zeros((2, 3)), 0.1)


def test_population_gradient_monte_carlo():
    n, m, sigma = 30, 2000, 0.5
    X = _simplex_point(make_rng(99), n)
    acc = np.zeros((n, n))
    acc2 = np.zeros((n, n))
    for k in range(m):
        A, B = sample_cgw(n, sigma, np.arange(n), derive_seed(61, k))
        G = gradient(EnergyContext(A, B), X)
        acc += G
        acc2 += G * G
    mean = acc / m
    se = np.sqrt((acc2 / m - mean**2) / m)
    assert np.all(np.abs(mean - population_gradient(X, sigma)) <= 5 * se)


# ---------------------------------------------------------------- efficiency ratio


@given(st.integers(2, 12), seeds, st.integers(1, 50))
def test_efficiency_ratio_norm_bounds(n, seed, samples):
    A, B = _pair(n, seed)
    r = efficiency_ratio(EnergyContext(A, B), samples, seed)
    lo = np.sqrt(np.log(n)) / n
    hi = np.sqrt(np.log(n))
    assert lo * (1 - 1e-12) <= r <= hi * (1 + 1e-12)


def test_efficiency_ratio_zero_gradient_is_nan():
    assert np.isnan(efficiency_ratio(EnergyContext(np.zeros((3, 3)), np.zeros((3, 3))), 5, 0))


def test_efficiency_ratio_deterministic():
    A, B = _pair(6, 3)
    ctx = EnergyContext(A, B)
    assert efficiency_ratio(ctx, 100, 4) == efficiency_ratio(ctx, 100, 4)


def test_efficiency_ratio_small_sample_close_to_reference():
    A = np.array([[0.3, -1.2], [-1.2, 0.8]])
    ctx = EnergyContext(A, A)
    ref = efficiency_ratio(ctx, 1_000_000, 1)
    est = efficiency_ratio(ctx, 10_000, 2)
    assert abs(est - ref) <= 0.1 * ref


def test_lipschitz_batching_invariant():
    A, B = _pair(5, 1)
    ctx = EnergyContext(A, B)
    assert lipschitz_estimates(ctx, 37, 9, batch=5) == lipschitz_estimates(ctx, 37, 9, batch=37)


def test_lipschitz_rejects_zero_samples():
    with pytest.raises(ValueError):
        lipschitz_estimates(EnergyContext(np.eye(2), np.eye(2)), 0, 0)
