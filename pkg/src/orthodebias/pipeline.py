"""Fit orchestration shared by the CLI, the tuner, and the estimators.

``fit_core`` runs one fit at a fixed hyperparameter:
scatters for both labelings -> shrinkage -> discriminant basis -> projection
-> standardization -> SVM. ``fit_model`` adds optional Bayesian tuning of C
on top. ``mode`` selects what the SVM sees: the d1 coordinate
("primary-only"), both projected coordinates ("full-2d"), or all raw
standardized features ("baseline", the no-reduction comparison arm).
"""

import logging

import numpy as np

from .classify import FittedModel, standardize, train_svm
from .errors import NotPositiveDefinite
from .orthodisc import fit_basis, project
from .scatter import compute_scatters, shrink_within

logger = logging.getLogger(__name__)

__all__ = ["MODES", "AUTO_SHRINKAGE", "build_basis", "fit_core", "fit_model"]

MODES = ("primary-only", "full-2d", "baseline")
AUTO_SHRINKAGE = 1e-6


def build_basis(data, gamma):
    """Scatters for both labelings, shrinkage, and the discriminant basis.

    When Cholesky rejects a within scatter at the requested gamma, the
    default shrinkage is applied automatically (once, with a warning) and
    recorded in the returned basis.
    """
    primary = compute_scatters(data, "primary")
    protected = compute_scatters(data, "protected")
    for attempt_gamma in _gamma_ladder(gamma):
        try:
            return fit_basis(
                shrink_within(primary, attempt_gamma),
                shrink_within(protected, attempt_gamma),
                attempt_gamma,
            )
        except NotPositiveDefinite:
            next_gamma = _next_gamma(attempt_gamma)
            if next_gamma is None:
                raise
            logger.warning(
                "within scatter not positive definite at gamma=%g; retrying with gamma=%g",
                attempt_gamma,
                next_gamma,
            )


def _gamma_ladder(gamma):
    ladder = [gamma]
    g = gamma
    while (g := _next_gamma(g)) is not None:
        ladder.append(g)
    return ladder


def _next_gamma(gamma):
    if gamma < AUTO_SHRINKAGE:
        return AUTO_SHRINKAGE
    return None


def fit_core(train, mode, gamma, C):
    """One deterministic fit at fixed C. Returns a FittedModel."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "baseline":
        coords = train.X
        basis = None
    else:
        basis = build_basis(train, gamma)
        z = project(train, basis).Z
        coords = z[:, :1] if mode == "primary-only" else z
    standardized, scaler = standardize(coords)
    w, b, objective = train_svm(standardized, train.y, C)
    return FittedModel(
        basis=basis,
        mode=mode,
        scaler=scaler,
        w=w,
        b=b,
        C=float(C),
        train_objective=objective,
    )


def fit_model(train, mode="primary-only", gamma=0.0, C=None, tune=True, budget=15, seed=0):
    """Fit with optional Bayesian tuning of C.

    With ``tune`` the hyperparameter is chosen by maximizing cross-validated
    AUC (see :mod:`orthodebias.tune`) and the evaluation trace is returned;
    otherwise ``C`` must be given. Returns (FittedModel, trace_or_None).
    """
    if tune:
        from .tune import tune_svm

        best_c, _, trace = tune_svm(train, mode=mode, gamma=gamma, budget=budget, seed=seed)
        return fit_core(train, mode, gamma, best_c), trace
    if C is None:
        raise ValueError("C is required when tuning is disabled")
    return fit_core(train, mode, gamma, C), None
