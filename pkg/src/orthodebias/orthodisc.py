"""Orthogonal discriminant directions and the 2-D projection.

The primary direction maximizes the Fisher quotient
R(d) = (d' B d) / (d' W d) for the primary labeling and has the closed form
d1 proportional to W^-1 (mean difference). The protected direction maximizes
the same quotient built from the protected labeling, subject to d2 being
orthogonal to d1. That constrained problem is solved in the orthonormal
complement of d1, where it reduces to an unconstrained symmetric-definite
generalized eigenproblem; the rank-1 correction from
:func:`deflation_matrix` expresses the same stationarity condition in the
full space and is kept as a verification identity.

Sign convention for every returned direction: the entry of largest absolute
value is positive (ties broken by lowest index), which makes results
deterministic and comparable across runs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDirection, DimensionMismatch, ZeroMeanDifference
from .numkernel import complement_basis, gen_sym_eigen, solve_spd, symmetrize

__all__ = [
    "DiscriminantBasis",
    "ProjectedDataset",
    "canonical_sign",
    "fisher_direction",
    "deflation_matrix",
    "second_direction",
    "fit_basis",
    "project",
]


@dataclass(frozen=True)
class DiscriminantBasis:
    """Orthonormal direction pair with its diagnostics.

    d1: primary discriminant direction (unit norm).
    d2: protected-attribute direction, orthogonal to d1 (unit norm).
    mu: top constrained generalized eigenvalue attained by d2.
    alpha1: normalizer of d1 (1 / norm of the unnormalized solve).
    gamma: within-scatter shrinkage actually applied during the fit.
    fisher_primary / fisher_protected: Fisher quotients at d1 and d2.
    eigengap: gap between the two largest reduced eigenvalues (None when
        the complement is one-dimensional); near-zero means d2 sits in a
        near-degenerate eigenspace and any member vector is equally optimal.
    """

    d1: np.ndarray
    d2: np.ndarray
    mu: float
    alpha1: float
    gamma: float
    fisher_primary: float
    fisher_protected: float
    eigengap: float | None = None

    @property
    def n_features(self):
        return self.d1.shape[0]

    def matrix(self):
        """M x 2 projection matrix with columns (d1, d2)."""
        return np.column_stack([self.d1, self.d2])


@dataclass(frozen=True)
class ProjectedDataset:
    """2-D coordinates (d1'x, d2'x) with labels carried over."""

    Z: np.ndarray
    y: np.ndarray
    a: np.ndarray
    ids: tuple


def canonical_sign(v):
    """Flip v so its largest-|entry| coordinate is positive (first on ties)."""
    v = np.asarray(v, dtype=float)
    lead = int(np.argmax(np.abs(v)))
    return -v if v[lead] < 0 else v.copy()


def rayleigh(direction, scatters):
    """Fisher quotient of ``direction`` under ``scatters``."""
    d = np.asarray(direction, dtype=float)
    return float((d @ scatters.between @ d) / (d @ scatters.within @ d))


def fisher_direction(primary):
    """Closed-form Fisher maximizer for the primary labeling.

    Returns (d1, alpha1) with d1 the canonical-sign unit vector along
    within^-1 @ mean_diff and alpha1 = 1 / ||within^-1 @ mean_diff||.
    """
    scale = np.linalg.norm(primary.class_means[0]) + np.linalg.norm(primary.class_means[1])
    s_b = primary.mean_diff
    if np.linalg.norm(s_b) <= 1e-12 * max(scale, np.finfo(float).tiny):
        raise ZeroMeanDifference("class means coincide for the primary labeling")
    raw = solve_spd(primary.within, s_b)
    alpha1 = 1.0 / float(np.linalg.norm(raw))
    return canonical_sign(alpha1 * raw), alpha1


def deflation_matrix(d1, protected):
    """Rank-1 correction encoding the orthogonality constraint.

    K1 = (d1 d1' Winv B) / (d1' Winv d1) with Winv the inverse of the
    protected within scatter and B the protected between scatter. Subtracting
    K1 from B inside the generalized eigenproblem removes the component that
    would violate d2 being orthogonal to d1.
    """
    d1 = np.asarray(d1, dtype=float)
    winv_d1 = solve_spd(protected.within, d1)
    denom = float(d1 @ winv_d1)
    row = winv_d1 @ protected.between  # = d1' Winv B, since Winv is symmetric
    return np.outer(d1, row) / denom


def second_direction(d1, protected):
    """Protected-attribute direction orthogonal to d1.

    Solves the generalized eigenproblem restricted to the complement of d1
    and maps the top eigenvector back, so d2 maximizes the protected Fisher
    quotient among all unit vectors orthogonal to d1. Returns (d2, mu).
    """
    d1 = np.asarray(d1, dtype=float)
    m = d1.shape[0]
    if m < 2:
        raise DegenerateDirection("need at least 2 features for a second direction")
    q = complement_basis(d1, m)
    between_c = symmetrize(q.T @ protected.between @ q)
    within_c = symmetrize(q.T @ protected.within @ q)
    values, vecs = gen_sym_eigen(between_c, within_c)
    d2 = canonical_sign(q @ vecs[:, 0])
    d2 /= np.linalg.norm(d2)
    mu = float(values[0])
    gap = float(values[0] - values[1]) if len(values) > 1 else None
    return d2, mu, gap


def fit_basis(primary, protected, gamma):
    """Compose both directions into a DiscriminantBasis.

    ``primary`` and ``protected`` must already carry any shrinkage; ``gamma``
    is recorded as the shrinkage that produced them.
    """
    d1, alpha1 = fisher_direction(primary)
    d2, mu, gap = second_direction(d1, protected)
    return DiscriminantBasis(
        d1=d1,
        d2=d2,
        mu=mu,
        alpha1=alpha1,
        gamma=float(gamma),
        fisher_primary=rayleigh(d1, primary),
        fisher_protected=rayleigh(d2, protected),
        eigengap=gap,
    )


def project(data, basis):
    """Project every sample onto (d1, d2), keeping ids and labels aligned."""
    if data.n_features != basis.n_features:
        raise DimensionMismatch(
            f"data has {data.n_features} features, basis expects {basis.n_features}"
        )
    return ProjectedDataset(Z=data.X @ basis.matrix(), y=data.y, a=data.a, ids=data.ids)
