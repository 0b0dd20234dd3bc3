"""Class means and between/within scatter matrices for binary labelings.

A :class:`FeatureDataset` carries one feature matrix with two parallel binary
labelings: the primary label ``y`` and the protected attribute ``a``.
:func:`compute_scatters` builds a :class:`ScatterSet` for either labeling;
:func:`shrink_within` adds trace-scaled ridge shrinkage so the within scatter
can always be inverted.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateClass, ZeroWithinScatter
from .numkernel import symmetrize

__all__ = ["FeatureDataset", "ScatterSet", "compute_scatters", "shrink_within"]


@dataclass(frozen=True)
class FeatureDataset:
    """Feature matrix with per-sample id, binary label, and binary attribute.

    Invariants are enforced on construction: at least 4 samples, finite
    features, labels and attributes in {0, 1}, and at least 2 samples in
    each label class and each attribute class.
    """

    ids: tuple
    X: np.ndarray
    y: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=int)
        a = np.asarray(self.a, dtype=int)
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "a", a)
        n = X.shape[0] if X.ndim == 2 else -1
        if X.ndim != 2 or n < 4:
            raise DegenerateClass("dataset", "*", "need a 2-D feature matrix with N >= 4")
        if not (len(self.ids) == len(y) == len(a) == n):
            raise DegenerateClass("dataset", "*", "ids/labels/attributes misaligned with X")
        if not np.all(np.isfinite(X)):
            raise DegenerateClass("dataset", "*", "features contain non-finite values")
        for name, arr in (("label", y), ("attribute", a)):
            if not np.isin(arr, (0, 1)).all():
                raise DegenerateClass(name, "*", f"{name} values must be 0 or 1")
            for value in (0, 1):
                if int(np.sum(arr == value)) < 2:
                    raise DegenerateClass(name, value)

    @property
    def n_samples(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    def labels_for(self, labeling):
        if labeling == "primary":
            return self.y
        if labeling == "protected":
            return self.a
        raise ValueError(f"unknown labeling {labeling!r}")

    def contingency(self):
        """2x2 table of (label, attribute) cell counts."""
        table = np.zeros((2, 2), dtype=int)
        for yv in (0, 1):
            for av in (0, 1):
                table[yv, av] = int(np.sum((self.y == yv) & (self.a == av)))
        return table

    def take(self, indices):
        """Row subset / resample (with repeats allowed). Revalidates invariants."""
        indices = np.asarray(indices, dtype=int)
        return FeatureDataset(
            ids=tuple(self.ids[i] for i in indices),
            X=self.X[indices],
            y=self.y[indices],
            a=self.a[indices],
        )


@dataclass(frozen=True)
class ScatterSet:
    """Means and scatter matrices of one binary labeling.

    ``mean_diff`` is class-1 mean minus class-2 mean (labeling value 0 is
    class 1, value 1 is class 2). ``between`` is the rank-1 outer product of
    ``mean_diff``; ``within`` is the pooled sum of squared deviations from
    the class means.
    """

    grand_mean: np.ndarray
    class_means: tuple
    mean_diff: np.ndarray
    between: np.ndarray
    within: np.ndarray
    counts: tuple
    labeling: str = field(default="primary")

    @property
    def n_features(self):
        return self.grand_mean.shape[0]


def compute_scatters(data, labeling):
    """Build the ScatterSet of ``data`` under ``labeling`` (primary|protected).

    Two-pass accumulation: class means first, then deviations, which is the
    numerically stable route for wide feature matrices.
    """
    labels = data.labels_for(labeling)
    X = data.X
    means = []
    counts = []
    within = np.zeros((data.n_features, data.n_features))
    for value in (0, 1):
        rows = X[labels == value]
        if rows.shape[0] < 2:
            raise DegenerateClass(labeling, value)
        mu = rows.mean(axis=0)
        dev = rows - mu
        within += dev.T @ dev
        means.append(mu)
        counts.append(rows.shape[0])
    mean_diff = means[0] - means[1]
    between = np.outer(mean_diff, mean_diff)
    grand_mean = (counts[0] * means[0] + counts[1] * means[1]) / data.n_samples
    return ScatterSet(
        grand_mean=grand_mean,
        class_means=(means[0], means[1]),
        mean_diff=mean_diff,
        between=symmetrize(between),
        within=symmetrize(within),
        counts=(counts[0], counts[1]),
        labeling=labeling,
    )


def shrink_within(scatters, gamma):
    """Replace within by within + gamma * (trace(within) / M) * I.

    The trace scaling makes gamma unit-free. gamma = 0 returns the input
    unchanged; gamma > 0 on a zero-trace within scatter raises
    ZeroWithinScatter because there is no scale to shrink toward.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    if gamma == 0:
        return scatters
    trace = float(np.trace(scatters.within))
    if trace <= 0.0:
        raise ZeroWithinScatter("within scatter has zero trace")
    m = scatters.n_features
    ridge = gamma * (trace / m) * np.eye(m)
    return ScatterSet(
        grand_mean=scatters.grand_mean,
        class_means=scatters.class_means,
        mean_diff=scatters.mean_diff,
        between=scatters.between,
        within=symmetrize(scatters.within + ridge),
        counts=scatters.counts,
        labeling=scatters.labeling,
    )
