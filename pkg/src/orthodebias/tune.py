"""Bayesian optimization of the SVM soft-margin parameter C.

The objective is mean stratified k-fold cross-validated AUC, maximized over
log10(C) in [-3, 3] with a Gaussian-process surrogate (squared-exponential
kernel, fixed lengthscale 0.2 x range, kernel variance set to the variance
of the observed values) and the expected-improvement acquisition evaluated
on a fixed 256-point grid. Five seeded low-discrepancy points start the
search. Everything is deterministic given the seed.

A second dimension (log10 of the shrinkage gamma) can be switched on with
``tune_gamma``; the surrogate machinery is dimension-agnostic.
"""

import hashlib
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateClass, IllConditionedKernel, NotPositiveDefinite
from .evaluate import roc_curve
from .numkernel import cholesky_spd, solve_lower, solve_upper

logger = logging.getLogger(__name__)

__all__ = [
    "TunerState",
    "make_tuner_state",
    "cv_objective",
    "gp_posterior",
    "expected_improvement",
    "tune_svm",
    "BOUNDS_LOG10_C",
    "BOUNDS_LOG10_GAMMA",
]

BOUNDS_LOG10_C = (-3.0, 3.0)
BOUNDS_LOG10_GAMMA = (-8.0, -1.0)
N_INITIAL = 5
GRID_SIZE = 256
JITTER_START = 1e-8
JITTER_CAP = 1e-4


@dataclass(frozen=True)
class TunerState:
    """Observations plus fixed surrogate hyperparameters.

    ``observations`` is a list of (x, f) pairs where x is a float in 1-D or
    a tuple in higher dimensions; bounds and lengthscale follow the same
    shape convention.
    """

    observations: tuple
    bounds: tuple
    kernel_lengthscale: tuple
    kernel_variance: float
    jitter: float
    seed: int

    @property
    def dim(self):
        return len(self.kernel_lengthscale)

    def x_matrix(self):
        return np.array([np.atleast_1d(x) for x, _ in self.observations], dtype=float)

    def f_vector(self):
        return np.array([f for _, f in self.observations], dtype=float)


def make_tuner_state(observations, bounds=BOUNDS_LOG10_C, seed=0, jitter=JITTER_START):
    """State with the fixed kernel policy applied to ``observations``."""
    bounds_nd = _as_bounds(bounds)
    lengthscale = tuple(0.2 * (hi - lo) for lo, hi in bounds_nd)
    f = np.array([obs[1] for obs in observations], dtype=float)
    variance = max(float(np.var(f)), 1e-8) if len(f) else 1e-8
    return TunerState(
        observations=tuple(observations),
        bounds=bounds_nd,
        kernel_lengthscale=lengthscale,
        kernel_variance=variance,
        jitter=jitter,
        seed=seed,
    )


def _as_bounds(bounds):
    arr = np.asarray(bounds, dtype=float)
    if arr.ndim == 1:
        return ((float(arr[0]), float(arr[1])),)
    return tuple((float(lo), float(hi)) for lo, hi in arr)


def _kernel(state, xa, xb):
    diff = xa[:, None, :] - xb[None, :, :]
    scaled = diff / np.asarray(state.kernel_lengthscale)
    return state.kernel_variance * np.exp(-0.5 * np.sum(scaled**2, axis=2))


def gp_posterior(state, x):
    """Posterior (mean, variance) at ``x`` under the noise-free GP.

    The prior mean is the average of the observed values, so the posterior
    reverts to it far from every observation. Jitter on the kernel diagonal
    is escalated x10 up to 1e-4 when factorization fails; past that the
    kernel is declared ill-conditioned.
    """
    if not state.observations:
        raise ValueError("gp_posterior needs at least one observation")
    xs = state.x_matrix()
    f = state.f_vector()
    prior_mean = float(f.mean())
    query = np.atleast_1d(np.asarray(x, dtype=float))[None, :]

    k_cross = _kernel(state, xs, query)[:, 0]
    jitter = state.jitter
    while True:
        gram = _kernel(state, xs, xs) + jitter * state.kernel_variance * np.eye(len(xs))
        gram = (gram + gram.T) / 2.0
        try:
            lower = cholesky_spd(gram)
            break
        except NotPositiveDefinite:
            jitter *= 10.0
            if jitter > JITTER_CAP:
                raise IllConditionedKernel(
                    f"kernel matrix singular even at jitter {jitter / 10.0:g}"
                ) from None

    alpha = solve_upper(lower, solve_lower(lower, f - prior_mean))
    v = solve_lower(lower, k_cross)
    mean = prior_mean + float(k_cross @ alpha)
    variance = max(float(state.kernel_variance - v @ v), 0.0)
    return mean, variance


def expected_improvement(state, x):
    """Closed-form E[max(0, f(x) - best observed)] under the posterior."""
    mean, variance = gp_posterior(state, x)
    f_best = float(state.f_vector().max())
    sd = math.sqrt(variance)
    if sd == 0.0:
        return max(0.0, mean - f_best)
    z = (mean - f_best) / sd
    pdf = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    cdf = 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))
    return max(0.0, sd * (z * cdf + pdf))


def _stable_hash(seed, sample_id):
    digest = hashlib.blake2b(f"{seed}:{sample_id}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _fold_indices(data, k, seed):
    """Stratified fold assignment keyed by sample-id hashes, not positions."""
    keys = np.array([_stable_hash(seed, sid) for sid in data.ids], dtype=np.uint64)
    folds = [[] for _ in range(k)]
    for yv in (0, 1):
        for av in (0, 1):
            cell = np.flatnonzero((data.y == yv) & (data.a == av))
            cell = cell[np.argsort(keys[cell], kind="stable")]
            for pos, idx in enumerate(cell):
                folds[pos % k].append(idx)
    # Canonical in-fold order by hash so row order never depends on input order.
    return [np.array(sorted(fold, key=lambda i: (keys[i], data.ids[i])), dtype=int) for fold in folds]


def _feasible_folds(data, k, seed):
    from .scatter import FeatureDataset  # local: avoids import cycle at module load

    folds = _fold_indices(data, k, seed)
    splits = []
    for held in range(k):
        test_idx = folds[held]
        train_idx = np.concatenate([folds[j] for j in range(k) if j != held])
        if len(np.unique(data.y[test_idx])) < 2:
            return None
        try:
            train_part = data.take(train_idx)
        except DegenerateClass:
            return None
        splits.append((train_part, test_idx))
    return splits


def cv_objective(data, mode, gamma, C, k=5, seed=0):
    """Mean k-fold cross-validated AUC of the pipeline at fixed (gamma, C).

    Folds are stratified by (label, attribute) cell and assigned by hashing
    sample ids with the seed, so the value is invariant to input row order.
    When some fold would lack a class, k is reduced to the largest feasible
    value >= 2 (with a warning).
    """
    from .pipeline import fit_core  # local: avoids import cycle at module load

    splits = None
    for k_eff in range(min(k, data.n_samples), 1, -1):
        splits = _feasible_folds(data, k_eff, seed)
        if splits is not None:
            if k_eff != k:
                logger.warning("reduced cross-validation folds from %d to %d", k, k_eff)
            break
    if splits is None:
        raise DegenerateClass("cv", "*", "no fold count >= 2 keeps every class populated")

    aucs = []
    for train_part, test_idx in splits:
        model = fit_core(train_part, mode, gamma, C)
        heldout_scores = _score_rows(model, data, test_idx)
        aucs.append(roc_curve(heldout_scores, data.y[test_idx]).auc)
    return float(np.mean(aucs))


def _score_rows(model, data, indices):
    # Score a row subset without FeatureDataset revalidation (held-out folds
    # may legitimately hold fewer than 2 samples of an attribute class).
    if model.mode == "baseline":
        coords = data.X[indices]
    else:
        z = data.X[indices] @ model.basis.matrix()
        coords = z[:, :1] if model.mode == "primary-only" else z
    return model.scaler.apply(coords) @ model.w + model.b


def _van_der_corput(index, base):
    value = 0.0
    denom = 1.0
    while index > 0:
        index, digit = divmod(index, base)
        denom *= base
        value += digit / denom
    return value


def _initial_points(bounds, seed):
    primes = (2, 3, 5, 7, 11)
    dim = len(bounds)
    rng = np.random.default_rng(seed)
    shift = rng.random(dim)
    points = []
    for i in range(1, N_INITIAL + 1):
        unit = [( _van_der_corput(i, primes[d]) + shift[d]) % 1.0 for d in range(dim)]
        points.append(tuple(lo + u * (hi - lo) for u, (lo, hi) in zip(unit, bounds)))
    return points


def _grid(bounds):
    dim = len(bounds)
    per_axis = GRID_SIZE if dim == 1 else int(round(GRID_SIZE ** (1.0 / dim)))
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def tune_svm(data, mode="primary-only", gamma=0.0, budget=15, seed=0,
             objective_fn=None, tune_gamma=False):
    """Maximize cross-validated AUC over C (optionally over gamma too).

    Runs 5 seeded low-discrepancy evaluations and then ``budget - 5``
    expected-improvement steps, each maximizing EI over a fixed 256-point
    grid. Returns (best C, best objective, trace); with ``tune_gamma`` the
    first element is the pair (C, gamma). ``objective_fn`` substitutes the
    cross-validation objective (it receives log10 C, or the (log10 C,
    log10 gamma) pair) and exists for testing the optimizer itself.

    The best observed value is returned, never a surrogate prediction, so
    the result with a larger budget and the same seed is at least as good.
    """
    if budget < 6:
        raise ValueError("budget must be at least 6")
    if tune_gamma:
        bounds = (BOUNDS_LOG10_C, BOUNDS_LOG10_GAMMA)
    else:
        bounds = (BOUNDS_LOG10_C,)

    if objective_fn is None:
        if tune_gamma:
            objective_fn = lambda x: cv_objective(data, mode, 10.0 ** x[1], 10.0 ** x[0], seed=seed)
        else:
            objective_fn = lambda x: cv_objective(data, mode, gamma, 10.0 ** x, seed=seed)

    def evaluate(point):
        x = point[0] if len(point) == 1 else tuple(point)
        return float(objective_fn(x))

    observations = []
    trace = []
    for point in _initial_points(bounds, seed):
        value = evaluate(point)
        observations.append((point[0] if len(point) == 1 else point, value))
        trace.append({"x": observations[-1][0], "objective": value})

    grid = _grid(bounds)
    for _ in range(budget - N_INITIAL):
        state = make_tuner_state(observations, bounds=bounds, seed=seed)
        ei = np.array([expected_improvement(state, row) for row in grid])
        pick = grid[int(np.argmax(ei))]
        value = evaluate(tuple(pick))
        observations.append((pick[0] if len(pick) == 1 else tuple(pick), value))
        trace.append({"x": observations[-1][0], "objective": value})

    best_x, best_f = max(observations, key=lambda obs: obs[1])
    if tune_gamma:
        best = (10.0 ** best_x[0], 10.0 ** best_x[1])
    else:
        best = 10.0 ** best_x
    return best, best_f, trace
