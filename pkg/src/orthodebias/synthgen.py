"""Synthetic confounded datasets with a known geometry.

Each sample is drawn as

    y ~ Bernoulli(1/2)
    a | y with P(a=1 | y=1) = 1/2 + rho/2 and P(a=1 | y=0) = 1/2 - rho/2
    x = mu_y * (2y-1) * e1 + mu_a * (2a-1) * e2 + sigma * eps

with eps standard normal in M dimensions. The label signal lives on the
first coordinate axis and the attribute signal on the second, so a pipeline
can be checked against the exactly-known confounder direction. Defaults
correlate the attribute with the label at train time (rho_train = 0.8) and
decorrelate at test time (rho_test = 0.0), with the attribute signal
stronger than the label signal: the classic shortcut trap.

RNG: numpy's default PCG64 generator seeded with the 64-bit ``seed``; the
train split is drawn first, then the test split, from the same stream.
"""

from dataclasses import dataclass

import numpy as np

from .scatter import FeatureDataset

__all__ = ["ConfoundSpec", "generate"]


@dataclass(frozen=True)
class ConfoundSpec:
    n_train: int = 2000
    n_test: int = 2000
    M: int = 16
    mu_y: float = 1.0
    mu_a: float = 1.5
    sigma: float = 1.0
    rho_train: float = 0.8
    rho_test: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_train < 8 or self.n_test < 8:
            raise ValueError("split sizes must be at least 8")
        if self.M < 2:
            raise ValueError("feature dimension must be at least 2")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        for name in ("rho_train", "rho_test"):
            if not -1.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [-1, 1]")


def _draw_split(rng, n, m, mu_y, mu_a, sigma, rho, prefix):
    y = (rng.random(n) < 0.5).astype(int)
    p_a = np.where(y == 1, 0.5 + rho / 2.0, 0.5 - rho / 2.0)
    a = (rng.random(n) < p_a).astype(int)
    X = sigma * rng.standard_normal((n, m))
    X[:, 0] += mu_y * (2 * y - 1)
    X[:, 1] += mu_a * (2 * a - 1)
    ids = tuple(f"{prefix}{i:06d}" for i in range(n))
    return FeatureDataset(ids=ids, X=X, y=y, a=a)


def generate(spec):
    """Draw (train, test) FeatureDatasets for ``spec``. Deterministic per seed."""
    rng = np.random.default_rng(spec.seed)
    train = _draw_split(
        rng, spec.n_train, spec.M, spec.mu_y, spec.mu_a, spec.sigma, spec.rho_train, "tr"
    )
    test = _draw_split(
        rng, spec.n_test, spec.M, spec.mu_y, spec.mu_a, spec.sigma, spec.rho_test, "te"
    )
    return train, test
