"""ROC curves, group-conditional auditing, and bootstrap resampling.

The audit scores a fitted model on a test set, picks one shared operating
threshold by Youden's J on the pooled scores, and compares true-positive
rates between the two attribute groups at that threshold. Attribute-leakage
scores (absolute Pearson correlation between each projected coordinate and
the attribute) show where attribute information lives in the reduced space.
:func:`run_audit` repeats this over bootstrap resamples of the test set.
"""

from dataclasses import dataclass

import numpy as np

from .classify import decision_scores
from .errors import DegenerateClass, DegenerateGroup, ResampleDegenerate, SingleClass
from .orthodisc import project

__all__ = [
    "RocCurve",
    "AuditRecord",
    "AuditReport",
    "roc_curve",
    "youden_threshold",
    "rates_at_threshold",
    "grouped_audit",
    "bootstrap_indices",
    "run_audit",
]


@dataclass(frozen=True)
class RocCurve:
    """Staircase of (FPR, TPR) points from (0,0) to (1,1).

    thresholds[i] is the lowest score still predicted positive at point i;
    the leading (0,0) point carries +inf. ``auc`` is the trapezoidal area,
    computed so it equals the Mann-Whitney pair statistic exactly.
    """

    points: tuple
    thresholds: tuple
    auc: float


@dataclass(frozen=True)
class AuditRecord:
    replicate_seed: int
    overall: RocCurve
    group_curves: dict
    threshold: float
    group_rates: dict
    tpr_gap: float
    leakage: tuple | None


@dataclass(frozen=True)
class AuditReport:
    records: tuple
    auc_mean: float
    auc_std: float
    tpr_gap_mean: float
    tpr_gap_std: float


def roc_curve(scores, y):
    """ROC curve over all distinct score thresholds, ties grouped.

    AUC is accumulated with integer tie-group counts and divided once by
    2 * n_pos * n_neg, which makes it bitwise equal to the pairwise
    concordance count P(s+ > s-) + 0.5 P(s+ = s-).
    """
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(y, dtype=int)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("ROC needs both label classes")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_y = y[order]

    points = [(0.0, 0.0)]
    thresholds = [float("inf")]
    tp = 0
    fp = 0
    auc_num = 0  # integer numerator: sum over groups of d_neg * (2*tp + d_pos)
    i = 0
    n = len(scores)
    while i < n:
        j = i
        d_pos = 0
        d_neg = 0
        while j < n and sorted_scores[j] == sorted_scores[i]:
            if sorted_y[j] == 1:
                d_pos += 1
            else:
                d_neg += 1
            j += 1
        auc_num += d_neg * (2 * tp + d_pos)
        tp += d_pos
        fp += d_neg
        points.append((fp / n_neg, tp / n_pos))
        thresholds.append(float(sorted_scores[i]))
        i = j

    auc = auc_num / (2 * n_pos * n_neg)
    return RocCurve(points=tuple(points), thresholds=tuple(thresholds), auc=auc)


def youden_threshold(curve):
    """Threshold maximizing TPR - FPR; ties broken by the lower threshold."""
    best_j = -np.inf
    best_threshold = None
    for (fpr, tpr), threshold in zip(curve.points, curve.thresholds):
        j = tpr - fpr
        if j > best_j or (j == best_j and threshold < best_threshold):
            best_j = j
            best_threshold = threshold
    return best_threshold


def rates_at_threshold(scores, y, threshold):
    """(TPR, FPR) of the rule score >= threshold."""
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(y, dtype=int)
    predicted = scores >= threshold
    pos = y == 1
    neg = ~pos
    tpr = float(np.sum(predicted & pos)) / float(np.sum(pos))
    fpr = float(np.sum(predicted & neg)) / float(np.sum(neg))
    return tpr, fpr


def _abs_corr(values, indicator):
    v = np.asarray(values, dtype=float)
    g = np.asarray(indicator, dtype=float)
    sv = v.std()
    sg = g.std()
    if sv <= 0.0 or sg <= 0.0:
        return 0.0
    return float(abs(np.mean((v - v.mean()) * (g - g.mean())) / (sv * sg)))


def grouped_audit(model, test, replicate_seed=0):
    """Audit one test set: pooled and per-group ROC, shared-threshold TPR gap.

    Requires both label classes within each attribute group so that
    per-group curves exist.
    """
    for value in (0, 1):
        group_y = test.y[test.a == value]
        if group_y.size == 0:
            raise DegenerateGroup(f"attribute group {value} is empty")
        if len(np.unique(group_y)) < 2:
            raise DegenerateGroup(f"attribute group {value} lacks a label class")

    scored = decision_scores(model, test)
    overall = roc_curve(scored.scores, scored.y)
    threshold = youden_threshold(overall)

    group_curves = {}
    group_rates = {}
    for value in (0, 1):
        mask = test.a == value
        group_curves[value] = roc_curve(scored.scores[mask], scored.y[mask])
        tpr, fpr = rates_at_threshold(scored.scores[mask], scored.y[mask], threshold)
        group_rates[value] = {"tpr": tpr, "fpr": fpr}

    tpr_gap = abs(group_rates[0]["tpr"] - group_rates[1]["tpr"])

    leakage = None
    if model.basis is not None:
        z = project(test, model.basis).Z
        leakage = (_abs_corr(z[:, 0], test.a), _abs_corr(z[:, 1], test.a))

    return AuditRecord(
        replicate_seed=replicate_seed,
        overall=overall,
        group_curves=group_curves,
        threshold=threshold,
        group_rates=group_rates,
        tpr_gap=tpr_gap,
        leakage=leakage,
    )


def bootstrap_indices(n, replicate_seed):
    """n indices drawn uniformly with replacement; deterministic per seed."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(replicate_seed)
    return rng.integers(0, n, size=n)


def _redraw_seed(base_seed, attempt):
    # Distinct deterministic stream per retry; attempt 0 is the plain seed.
    if attempt == 0:
        return base_seed
    return (base_seed + attempt * 1_000_000_007) % (2**63)


def run_audit(model, test, replicates=5, seed=0, identity_resample=False):
    """Bootstrap audit: ``replicates`` resampled copies of ``test``.

    Replicate r resamples with seed ``seed + r``; a resample that loses a
    label class or attribute group is redrawn with an incremented sub-seed,
    up to 100 attempts. ``identity_resample`` skips resampling entirely
    (every replicate audits the raw test set) and exists for tests.
    """
    if replicates < 1:
        raise ValueError("need at least one replicate")
    records = []
    for r in range(replicates):
        base_seed = seed + r
        if identity_resample:
            records.append(grouped_audit(model, test, replicate_seed=base_seed))
            continue
        for attempt in range(100):
            sub_seed = _redraw_seed(base_seed, attempt)
            try:
                sample = test.take(bootstrap_indices(test.n_samples, sub_seed))
                records.append(grouped_audit(model, sample, replicate_seed=sub_seed))
                break
            except (DegenerateClass, DegenerateGroup, SingleClass) as exc:
                last_error = exc
        else:
            raise ResampleDegenerate(
                f"replicate {r}: no valid resample in 100 attempts ({last_error})"
            )

    aucs = np.array([rec.overall.auc for rec in records])
    gaps = np.array([rec.tpr_gap for rec in records])
    return AuditReport(
        records=tuple(records),
        auc_mean=float(aucs.mean()),
        auc_std=float(aucs.std()),
        tpr_gap_mean=float(gaps.mean()),
        tpr_gap_std=float(gaps.std()),
    )
