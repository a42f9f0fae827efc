import numpy as np
import pytest

from vropt import (LogisticProblem, RidgeProblem, generate_synthetic,
                   normalize_rows)


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    # keep reference-optimum cache files out of the real home directory
    monkeypatch.setenv("VROPT_CACHE_DIR", str(tmp_path / "refcache"))


def make_logistic(n, d, seed, kappa, sep=3.0):
    """Synthetic logistic problem with condition number exactly kappa.

    Rows are normalized to unit norm, so L = 1/4 + mu and choosing
    mu = 0.25/(kappa - 1) pins L/mu = kappa.
    """
    ds = normalize_rows(generate_synthetic(n, d, seed, sep))
    return LogisticProblem(ds, 0.25 / (kappa - 1.0))


def make_ridge(n=4, d=3, seed=0, mu=0.3):
    rng = np.random.default_rng(seed)
    return RidgeProblem(rng.standard_normal((n, d)),
                        rng.standard_normal(n), mu)


class ScriptedRng:
    """Stand-in generator that replays a fixed draw sequence, used to pin
    solver paths in enumeration tests. random() feeds the snapshot-index
    draw; integers() feeds the per-step component picks."""

    def __init__(self, uniform=(), ints=()):
        self.uniform = list(uniform)
        self.ints = list(ints)

    def random(self):
        return self.uniform.pop(0)

    def integers(self, n):
        i = self.ints.pop(0)
        assert 0 <= i < int(n)
        return i
