from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from conftest import ScriptedRng
from vropt import AveragingScheme, WeightVector, sample_snapshot_index, weights

W_SVRG = AveragingScheme.WEIGHTED_SVRG
W_SARAH = AveragingScheme.WEIGHTED_SARAH


def exact_svrg_weights(m, delta):
    """Rational oracle: p_k = (1-d)^(m-1-k) / sum over k in 1..m-1."""
    d = Fraction(delta)
    raw = [(1 - d) ** (m - 1 - k) for k in range(1, m)]
    q = sum(raw)
    return [Fraction(0)] + [r / q for r in raw] + [Fraction(0)]


def exact_sarah_weights(m, delta):
    """Rational oracle: p_k = (1 - (1-d)^(m-1-k)) / c for k in 0..m-2."""
    d = Fraction(delta)
    raw = [1 - (1 - d) ** (m - 1 - k) for k in range(m - 1)]
    c = sum(raw)
    return [r / c for r in raw] + [Fraction(0), Fraction(0)]


def test_frozen_weighted_svrg_m2():
    w = weights(W_SVRG, 2, mu=0.5, eta=1.0)
    assert w.weights.tolist() == [0.0, 1.0, 0.0]


def test_frozen_weighted_sarah_m3():
    w = weights(W_SARAH, 3, mu=0.5, eta=1.0)
    assert np.allclose(w.weights, [0.6, 0.4, 0.0, 0.0], atol=1e-12)


def test_frozen_uniform_m4():
    w = weights(AveragingScheme.UNIFORM, 4)
    assert np.allclose(w.weights, [0.25, 0.25, 0.25, 0.25, 0.0], atol=0)


def test_last_iterate_schemes():
    w = weights(AveragingScheme.LAST_SVRG, 5)
    assert w.weights.tolist() == [0, 0, 0, 0, 0, 1]
    w = weights(AveragingScheme.LAST_SARAH, 5)
    assert w.weights.tolist() == [0, 0, 0, 0, 1, 0]


@pytest.mark.parametrize("m,delta", [(2, 0.25), (3, 0.25), (6, 0.25),
                                     (6, 0.03125), (17, 0.5)])
def test_weighted_svrg_matches_rational_oracle(m, delta):
    w = weights(W_SVRG, m, mu=delta, eta=1.0)
    exact = [float(p) for p in exact_svrg_weights(m, delta)]
    assert np.allclose(w.weights, exact, atol=1e-14)


@pytest.mark.parametrize("m,delta", [(2, 0.25), (3, 0.5), (6, 0.25),
                                     (6, 0.03125), (17, 0.5)])
def test_weighted_sarah_matches_rational_oracle(m, delta):
    w = weights(W_SARAH, m, mu=delta, eta=1.0)
    exact = [float(p) for p in exact_sarah_weights(m, delta)]
    assert np.allclose(w.weights, exact, atol=1e-14)


@pytest.mark.parametrize("scheme", list(AveragingScheme))
@pytest.mark.parametrize("m", [2, 3, 10, 257])
def test_weights_are_a_distribution(scheme, m):
    w = weights(scheme, m, mu=1e-3, eta=0.9)
    assert w.weights.shape == (m + 1,)
    assert np.all(w.weights >= 0)
    assert abs(float(np.sum(w.weights)) - 1.0) <= 1e-12
    assert w.m == m


def test_weighted_svrg_weights_increase_toward_snapshot():
    w = weights(W_SVRG, 9, mu=0.05, eta=1.0).weights
    inner = w[1:9]
    assert np.all(np.diff(inner) > 0)
    assert w[0] == 0 and w[9] == 0


def test_weighted_sarah_weights_decrease():
    w = weights(W_SARAH, 9, mu=0.05, eta=1.0).weights
    inner = w[:8]
    assert np.all(np.diff(inner) < 0)
    assert w[8] == 0 and w[9] == 0


def test_weighted_svrg_small_delta_limit_is_uniform():
    w = weights(W_SVRG, 10, mu=1e-8, eta=1.0).weights
    assert np.allclose(w[1:10], 1.0 / 9.0, atol=1e-6)


def test_weighted_sarah_small_delta_limit_is_triangular():
    m = 10
    w = weights(W_SARAH, m, mu=1e-8, eta=1.0).weights
    tri = np.array([m - 1 - k for k in range(m - 1)], dtype=float)
    tri /= tri.sum()
    assert np.allclose(w[:m - 1], tri, atol=1e-6)


def test_weights_validation():
    with pytest.raises(ValueError):
        weights(AveragingScheme.UNIFORM, 1)
    with pytest.raises(ValueError):
        weights(W_SVRG, 4)  # needs mu and eta
    with pytest.raises(ValueError):
        weights(W_SVRG, 4, mu=1.0, eta=1.0)  # mu*eta >= 1
    with pytest.raises(ValueError):
        weights(W_SARAH, 4, mu=2.0, eta=0.5)


def test_weight_vector_validation():
    with pytest.raises(ValueError):
        WeightVector(np.array([0.5, 0.4]))  # does not sum to 1
    with pytest.raises(ValueError):
        WeightVector(np.array([1.5, -0.5]))


def test_sampler_inverse_cdf_boundaries():
    w = weights(AveragingScheme.UNIFORM, 4)  # mass 1/4 on 0..3
    picks = [sample_snapshot_index(w, ScriptedRng(uniform=[u]))
             for u in (0.0, 0.24999, 0.25, 0.74999, 0.75, 0.999999)]
    assert picks == [0, 0, 1, 2, 3, 3]


def test_sampler_never_returns_zero_probability_index():
    w = weights(AveragingScheme.LAST_SARAH, 6)  # all mass on index 5
    assert sample_snapshot_index(w, ScriptedRng(uniform=[0.9999999999])) == 5
    assert sample_snapshot_index(w, ScriptedRng(uniform=[0.0])) == 5
    # float cumsum can end slightly below 1; the draw above it must clamp
    w2 = weights(W_SARAH, 12, mu=0.01, eta=1.0)
    hi = sample_snapshot_index(w2, ScriptedRng(uniform=[1.0 - 1e-16]))
    assert w2.weights[hi] > 0


def test_sampler_consumes_exactly_one_draw():
    w = weights(AveragingScheme.UNIFORM, 3)
    rng = ScriptedRng(uniform=[0.5, 0.9])
    sample_snapshot_index(w, rng)
    assert len(rng.uniform) == 1


def test_sampler_distribution_weighted_sarah():
    w = weights(W_SARAH, 6, mu=0.3, eta=1.0)
    rng = np.random.default_rng(42)
    draws = np.array([sample_snapshot_index(w, rng) for _ in range(30000)])
    freq = np.bincount(draws, minlength=7) / draws.size
    assert np.max(np.abs(freq - w.weights)) <= 0.02
    live = w.weights > 0
    chi = stats.chisquare(np.bincount(draws, minlength=7)[live],
                          draws.size * w.weights[live])
    assert chi.pvalue > 1e-4


def test_sampler_distribution_weighted_svrg():
    w = weights(W_SVRG, 5, mu=0.4, eta=1.0)
    rng = np.random.default_rng(4242)
    draws = np.array([sample_snapshot_index(w, rng) for _ in range(30000)])
    freq = np.bincount(draws, minlength=6) / draws.size
    assert np.max(np.abs(freq - w.weights)) <= 0.02
