"""Snapshot-averaging schemes: probability weights over the m+1 inner iterates
and the lazy snapshot-index sampler.

Instead of forming a weighted average of inner iterates, the next snapshot is
DRAWN: sample an index M from the scheme's pmf over {0..m} first, run only M
inner steps, and return iterate x_M. The five schemes:

    UNIFORM         p_m = 0, p_k = 1/m otherwise (either solver)
    LAST_SVRG       point mass on x_m
    LAST_SARAH      point mass on x_{m-1}
    WEIGHTED_SVRG   p_0 = p_m = 0, p_k proportional to (1-mu*eta)^(m-k-1)
    WEIGHTED_SARAH  p_k proportional to 1-(1-mu*eta)^(m-k-1) for k <= m-2
"""

from __future__ import annotations

import enum

import numpy as np

__all__ = ["AveragingScheme", "WeightVector", "weights", "sample_snapshot_index"]


class AveragingScheme(enum.Enum):
    LAST_SVRG = "last_svrg"
    LAST_SARAH = "last_sarah"
    UNIFORM = "uniform"
    WEIGHTED_SVRG = "weighted_svrg"
    WEIGHTED_SARAH = "weighted_sarah"


class WeightVector:
    """A pmf over iterate indices 0..m (length m+1, sums to one)."""

    __slots__ = ("weights", "_last_positive")

    def __init__(self, w: np.ndarray):
        w = np.asarray(w, dtype=np.float64)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a nonempty 1-D array")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        total = float(w.sum())
        if not np.isfinite(total) or abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {total}, expected 1")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "_last_positive",
                           int(np.flatnonzero(w > 0)[-1]))

    def __setattr__(self, name, value):
        raise AttributeError("WeightVector is immutable")

    @property
    def m(self) -> int:
        return self.weights.size - 1

    def __len__(self):
        return self.weights.size


def _decay_powers(base: float, count: int) -> np.ndarray:
    """[base^1, ..., base^count] by iterative multiplication, so that
    normalizers computed as sums stay consistent with the terms."""
    if count == 0:
        return np.zeros(0)
    return np.cumprod(np.full(count, base))


def weights(scheme: AveragingScheme, m: int, mu: float | None = None,
            eta: float | None = None) -> WeightVector:
    """Build the pmf p over iterates 0..m for one inner loop.

    Args:
        scheme: which averaging rule.
        m: inner-loop length, >= 2.
        mu, eta: strong-convexity modulus and step size; required by the
            weighted schemes (their decay factor is 1 - mu*eta).

    Raises:
        ValueError: m < 2; or a weighted scheme with mu*eta outside (0, 1);
            or a degenerate WEIGHTED_SARAH normalizer (m too small for the
            given mu*eta).
    """
    if m < 2:
        raise ValueError(f"inner length m must be >= 2, got {m}")
    p = np.zeros(m + 1)
    if scheme is AveragingScheme.UNIFORM:
        p[:m] = 1.0 / m
    elif scheme is AveragingScheme.LAST_SVRG:
        p[m] = 1.0
    elif scheme is AveragingScheme.LAST_SARAH:
        p[m - 1] = 1.0
    else:
        if mu is None or eta is None:
            raise ValueError(f"{scheme.name} weights need mu and eta")
        delta = mu * eta
        if not 0.0 < delta < 1.0:
            raise ValueError(f"weighted schemes need 0 < mu*eta < 1, "
                             f"got mu*eta = {delta}")
        # powers[j-1] = (1-delta)^j for j = 1..m-1
        powers = _decay_powers(1.0 - delta, m - 1)
        if scheme is AveragingScheme.WEIGHTED_SVRG:
            # p_k ~ (1-delta)^(m-k-1), k = 1..m-1; exponent m-k-1 runs m-2..0
            raw = np.empty(m - 1)
            raw[-1] = 1.0  # (1-delta)^0
            raw[:-1] = powers[:m - 2][::-1]
            q = float(raw.sum())  # equals (1-(1-delta)^(m-1))/delta exactly
            p[1:m] = raw / q
        elif scheme is AveragingScheme.WEIGHTED_SARAH:
            # p_k ~ 1-(1-delta)^(m-k-1), k = 0..m-2; exponent runs m-1..1
            raw = 1.0 - powers[::-1]
            c = float(raw.sum())  # equals m - 1/delta + (1-delta)^m/delta
            if not np.isfinite(c) or c <= 0.0:
                raise ValueError(
                    f"degenerate weighted normalizer c = {c} at m = {m}, "
                    f"mu*eta = {delta}; m is too small for these constants")
            p[:m - 1] = raw / c
        else:  # pragma: no cover - enum is closed
            raise ValueError(f"unknown scheme {scheme}")
    return WeightVector(p)


def sample_snapshot_index(w: WeightVector, rng: np.random.Generator) -> int:
    """Draw M in {0..m} with P[M = k] = w.weights[k].

    Consumes exactly one uniform draw (inverse CDF over the cumulative
    weights), so a run's RNG stream advances by one per outer loop
    regardless of m. Deterministic given the generator state.
    """
    u = rng.random()
    cum = np.cumsum(w.weights)
    idx = int(np.searchsorted(cum, u, side="right"))
    # floating summation can leave cum[-1] slightly below 1; clamp into support
    return min(idx, w._last_positive)
