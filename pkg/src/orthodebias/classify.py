"""Deterministic linear soft-margin SVM over projected coordinates.

The decision model is score = w . z + b on standardized coordinates, trained
by full-batch subgradient descent on the hinge objective

    F(w, b) = 0.5 ||w||^2 + C * sum_i max(0, 1 - t_i (w . z_i + b))

with t_i = 2 y_i - 1. Training is deterministic: fixed zero initialization,
fixed 5000-iteration budget, Pegasos step sizes 1/(lambda * t) with
lambda = 1/(n C), a safeguard projection onto the ball of radius
1/sqrt(lambda) (which contains the minimizer), and averaging of the final
half of the iterates. Identical inputs give bit-identical weights.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SingleClass, ZeroVariance
from .orthodisc import project

__all__ = [
    "Scaler",
    "FittedModel",
    "ScoreSet",
    "standardize",
    "svm_objective",
    "train_svm",
    "decision_scores",
]

SVM_ITERATIONS = 5000


@dataclass(frozen=True)
class Scaler:
    """Per-coordinate mean and population standard deviation."""

    mean: np.ndarray
    std: np.ndarray

    def apply(self, Z):
        return (np.asarray(Z, dtype=float) - self.mean) / self.std


@dataclass(frozen=True)
class FittedModel:
    """Everything needed to score new samples.

    mode is one of:
      primary-only  score on the standardized d1 coordinate (default pipeline),
      full-2d       score on both standardized projected coordinates,
      baseline      no basis; score on all standardized raw features.
    basis is None exactly when mode == "baseline".
    """

    basis: object
    mode: str
    scaler: Scaler
    w: np.ndarray
    b: float
    C: float
    train_objective: float

    def coordinates(self, data):
        """Raw (unstandardized) model-input coordinates for ``data``."""
        if self.mode == "baseline":
            if data.n_features != self.scaler.mean.shape[0]:
                raise DimensionMismatch(
                    f"data has {data.n_features} features, model expects "
                    f"{self.scaler.mean.shape[0]}"
                )
            return data.X
        z = project(data, self.basis).Z
        return z[:, :1] if self.mode == "primary-only" else z


@dataclass(frozen=True)
class ScoreSet:
    """Per-sample decision values aligned with labels and attributes."""

    scores: np.ndarray
    y: np.ndarray
    a: np.ndarray
    ids: tuple


def standardize(Z, scaler=None):
    """Standardize coordinates; fit the scaler when one is not supplied.

    Returns (standardized, scaler). Fitting uses the population standard
    deviation and raises ZeroVariance(j) if coordinate j is constant.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    if scaler is None:
        mean = Z.mean(axis=0)
        std = Z.std(axis=0)
        for j, s in enumerate(std):
            if s <= 0.0:
                raise ZeroVariance(j)
        scaler = Scaler(mean=mean, std=std)
    return scaler.apply(Z), scaler


def svm_objective(w, b, Z, t, C):
    """Hinge objective F(w, b) = 0.5 ||w||^2 + C * sum hinge."""
    margins = t * (Z @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins)
    return 0.5 * float(w @ w) + C * float(hinge.sum())


def train_svm(Z, y, C):
    """Train the linear SVM; returns (w, b, objective).

    Requires both classes present. See the module docstring for the exact
    deterministic optimization scheme.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    y = np.asarray(y, dtype=int)
    if len(np.unique(y)) < 2:
        raise SingleClass("training labels contain a single class")
    if C <= 0:
        raise ValueError("C must be positive")
    n, d = Z.shape
    t = 2.0 * y - 1.0
    lam = 1.0 / (n * C)
    radius = 1.0 / np.sqrt(lam)

    w = np.zeros(d)
    b = 0.0
    tail_start = SVM_ITERATIONS // 2
    w_sum = np.zeros(d)
    b_sum = 0.0
    tail_count = 0
    for step in range(1, SVM_ITERATIONS + 1):
        margins = t * (Z @ w + b)
        active = t * (margins < 1.0)
        # Subgradient of the objective scaled by 1/(nC): lam*w - mean(t_i z_i).
        grad_w = lam * w - (Z.T @ active) / n
        grad_b = -float(active.sum()) / n
        eta = 1.0 / (lam * step)
        w = w - eta * grad_w
        b = b - eta * grad_b
        norm = np.sqrt(w @ w + b * b)
        if norm > radius:
            scale = radius / norm
            w = w * scale
            b = b * scale
        if step > tail_start:
            w_sum += w
            b_sum += b
            tail_count += 1
    w_avg = w_sum / tail_count
    b_avg = b_sum / tail_count
    return w_avg, float(b_avg), svm_objective(w_avg, b_avg, Z, t, C)


def decision_scores(model, data):
    """Score each sample of ``data`` with a fitted model."""
    coords = model.coordinates(data)
    standardized, _ = standardize(coords, model.scaler)
    scores = standardized @ model.w + model.b
    return ScoreSet(scores=scores, y=data.y, a=data.a, ids=data.ids)
