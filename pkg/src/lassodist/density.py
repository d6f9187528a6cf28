"""Closed-form joint density of the penalized estimator and its subgradient.

The augmented estimator lives on a union of faces indexed by the active
set: coefficients on the active coordinates, subgradient values on the
rest.  This module evaluates its exact density in both regimes, p <= n
(full score space) and p > n (row-space coordinates plus a linear
constraint on the subgradient).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space
from scipy.special import gammaincc, gammaln, logsumexp

from .errors import ConfigError, DataError, NumericalError
from .problem import ProblemSpec, SpectralBasis, log_det_jacobian

__all__ = [
    "AugmentedState",
    "Gaussian",
    "StudentT",
    "EmpiricalElliptical",
    "ErrorModel",
    "C_TOL",
    "score_map",
    "gaussian_moments",
    "log_density",
    "inactive_null_basis",
    "log_density_rowspace",
    "rowspace_residual",
    "log_det_rowspace_jacobian",
    "sample_errors",
]

C_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class AugmentedState:
    """One point of the augmented space: (active set, coefficients, subgradient).

    ``active`` holds sorted coordinate indices, ``b_active`` the nonzero
    coefficient values on them, and ``s_inactive`` the subgradient values
    (in [-1, 1]) on the complementary coordinates in ascending order.
    """

    active: np.ndarray
    b_active: np.ndarray
    s_inactive: np.ndarray

    @property
    def dimension(self) -> int:
        return self.active.size + self.s_inactive.size

    def theta(self) -> np.ndarray:
        """Mixed coordinate vector: b_j where active, s_j elsewhere."""
        p = self.dimension
        out = np.empty(p)
        mask = self.active_mask()
        out[mask] = self.b_active
        out[~mask] = self.s_inactive
        return out

    def active_mask(self) -> np.ndarray:
        mask = np.zeros(self.dimension, dtype=bool)
        mask[self.active] = True
        return mask

    def beta_hat(self) -> np.ndarray:
        out = np.zeros(self.dimension)
        out[self.active] = self.b_active
        return out

    def subgradient(self) -> np.ndarray:
        out = np.empty(self.dimension)
        mask = self.active_mask()
        out[mask] = np.sign(self.b_active)
        out[~mask] = self.s_inactive
        return out


def state_from_arrays(theta: np.ndarray, active_mask: np.ndarray) -> AugmentedState:
    """Assemble a state from the mixed coordinate vector and active mask."""
    active = np.nonzero(active_mask)[0]
    return AugmentedState(
        active=active,
        b_active=np.asarray(theta)[active_mask].copy(),
        s_inactive=np.asarray(theta)[~active_mask].copy(),
    )


def validate_state(state: AugmentedState, p: int) -> None:
    """Check membership in the augmented space for a p-dimensional problem."""
    if state.dimension != p:
        raise DataError(f"state dimension {state.dimension} does not match p={p}")
    idx = np.asarray(state.active, dtype=int)
    if idx.size:
        if idx.min() < 0 or idx.max() >= p or np.unique(idx).size != idx.size:
            raise DataError("active indices must be distinct and in range")
    if np.any(state.b_active == 0.0):
        raise DataError("active coefficients must be nonzero")
    if np.any(np.abs(state.s_inactive) > 1.0):
        raise DataError("inactive subgradient values must lie in [-1, 1]")


@dataclass(frozen=True, eq=False)
class Gaussian:
    """Gaussian error model: score vector distributed N(0, sigma2 * C / n)."""

    sigma2: float


@dataclass(frozen=True, eq=False)
class StudentT:
    """Multivariate-t score model with ``dof`` degrees of freedom.

    The scale matrix is ``scale * C / n``; ``dof = n - p`` and
    ``scale = sigma2_hat`` give the posterior-matching model.
    """

    dof: float
    scale: float


@dataclass(frozen=True, eq=False)
class EmpiricalElliptical:
    """Elliptically symmetric score model fit as a radial histogram.

    The density of the whitened score depends only on its Euclidean norm:
    piecewise constant over ``edges`` shells with occupancy ``counts``, and
    log-linear (slope ``tail_slope``, intercept ``tail_intercept``) beyond
    the last edge.  ``log_norm`` normalizes the whole thing over R^dim.
    ``residual_pool`` holds centered residuals for bootstrap noise draws.
    """

    edges: np.ndarray
    counts: np.ndarray
    tail_slope: float
    tail_intercept: float
    dim: int
    log_norm: float
    residual_pool: np.ndarray | None = None


ErrorModel = Gaussian | StudentT | EmpiricalElliptical


def log_unit_ball_volume(dim: int) -> float:
    """log volume of the unit ball in R^dim."""
    return 0.5 * dim * math.log(math.pi) - gammaln(0.5 * dim + 1.0)


def radial_log_norm(
    edges: np.ndarray, counts: np.ndarray, dim: int, tail_slope: float, tail_intercept: float
) -> float:
    """Log normalizing constant of the piecewise radial density in R^dim."""
    log_cp = log_unit_ball_volume(dim)
    interior = log_cp + math.log(float(np.sum(counts)))
    if not math.isfinite(tail_slope) or tail_slope >= 0:
        if tail_slope >= 0:
            raise NumericalError("radial tail slope must be negative for integrability")
        return interior
    h_last = float(edges[-1])
    tail = (
        tail_intercept
        + math.log(dim)
        + log_cp
        + gammaln(dim)
        + math.log(gammaincc(dim, -tail_slope * h_last))
        - dim * math.log(-tail_slope)
    )
    return float(logsumexp([interior, tail]))


def radial_log_pdf(model: EmpiricalElliptical, radius: float) -> float:
    """Normalized log density (in R^dim) at whitened radius ``radius``."""
    edges = model.edges
    h_last = float(edges[-1])
    if radius >= h_last:
        if not math.isfinite(model.tail_slope):
            return -math.inf
        return model.tail_intercept + model.tail_slope * radius - model.log_norm
    m = int(np.searchsorted(edges, radius, side="right")) - 1
    m = max(m, 0)
    count = float(model.counts[m])
    if count <= 0:
        return -math.inf
    dim = model.dim
    lo, hi = float(edges[m]), float(edges[m + 1])
    log_width = dim * math.log(hi)
    if lo > 0.0:
        log_width += math.log1p(-((lo / hi) ** dim))
    return math.log(count) - log_width - model.log_norm


def log_error_density_from_qform(model: ErrorModel, qform: float, spec: ProblemSpec) -> float:
    """Log density of the score vector given its Mahalanobis form u'C^{-1}u.

    All three error models are elliptical in the whitened score, so the
    quadratic form is a sufficient argument; the Jacobian of the whitening
    contributes ``-log det C / 2``.
    """
    p, n = spec.p, spec.n
    if isinstance(model, Gaussian):
        if model.sigma2 <= 0:
            raise ConfigError("Gaussian variance must be positive")
        return float(
            -0.5 * p * math.log(2.0 * math.pi * model.sigma2 / n)
            - 0.5 * spec.log_det_gram
            - 0.5 * n * qform / model.sigma2
        )
    if isinstance(model, StudentT):
        if model.dof <= 0 or model.scale <= 0:
            raise ConfigError("StudentT dof and scale must be positive")
        nu = float(model.dof)
        log_det_scale = p * math.log(model.scale / n) + spec.log_det_gram
        quad = n * qform / model.scale
        return float(
            gammaln(0.5 * (nu + p))
            - gammaln(0.5 * nu)
            - 0.5 * p * math.log(nu * math.pi)
            - 0.5 * log_det_scale
            - 0.5 * (nu + p) * math.log1p(quad / nu)
        )
    if isinstance(model, EmpiricalElliptical):
        if model.dim != p:
            raise ConfigError(f"elliptical model dimension {model.dim} does not match p={p}")
        return radial_log_pdf(model, math.sqrt(max(qform, 0.0))) - 0.5 * spec.log_det_gram
    raise ConfigError(f"unknown error model {type(model).__name__}")


def score_map(state: AugmentedState, beta: np.ndarray, spec: ProblemSpec) -> np.ndarray:
    """Map a state to the score vector it must have produced.

    Inverts the stationarity equation: the score equals
    ``C (beta_hat - beta) + lam * w * S``.
    """
    beta = np.asarray(beta, dtype=float)
    return spec.gram @ (state.beta_hat() - beta) + spec.lam * spec.weights * state.subgradient()


def _assemble_jacobian(A: np.ndarray, spec: ProblemSpec) -> np.ndarray:
    """The p x p matrix sending (b_A, s_I) to the score: (C_A | lam W_I)."""
    idx = np.sort(np.asarray(A, dtype=int).ravel())
    mask = np.zeros(spec.p, dtype=bool)
    mask[idx] = True
    inactive = np.nonzero(~mask)[0]
    D = np.empty((spec.p, spec.p))
    D[:, : idx.size] = spec.gram[:, idx]
    D[:, idx.size :] = 0.0
    for col, j in enumerate(inactive, start=idx.size):
        D[j, col] = spec.lam * spec.weights[j]
    return D


def gaussian_moments(
    A: np.ndarray,
    s_active: np.ndarray,
    beta: np.ndarray,
    sigma2: float,
    spec: ProblemSpec,
) -> tuple[np.ndarray, np.ndarray]:
    """Mean and covariance of (b_A, s_I) under the Gaussian score model.

    Coordinates are ordered active block first (ascending index), then
    inactive block.  Requires p <= n so the Gram matrix is nonsingular.
    """
    idx = np.sort(np.asarray(A, dtype=int).ravel())
    s_active = np.asarray(s_active, dtype=float)
    beta = np.asarray(beta, dtype=float)
    D = _assemble_jacobian(idx, spec)
    rhs = spec.gram @ beta
    rhs[idx] -= spec.lam * spec.weights[idx] * s_active
    try:
        Dinv = np.linalg.inv(D)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("state-to-score Jacobian is singular") from exc
    mu = Dinv @ rhs
    cov = (sigma2 / spec.n) * (Dinv @ spec.gram @ Dinv.T)
    cov = (cov + cov.T) / 2.0
    return mu, cov


def log_density(
    state: AugmentedState,
    beta: np.ndarray,
    model: ErrorModel,
    spec: ProblemSpec,
) -> float:
    """Log joint density of the augmented estimator for p <= n.

    The density is the score density evaluated at the mapped state times
    the absolute Jacobian determinant of the map.
    """
    validate_state(state, spec.p)
    u = score_map(state, beta, spec)
    sol = spec.gram_solve(u)
    qform = float(u @ sol)
    return log_error_density_from_qform(model, qform, spec) + log_det_jacobian(
        state.active, spec
    )


def inactive_null_basis(
    I: np.ndarray, basis: SpectralBasis, spec: ProblemSpec
) -> np.ndarray:
    """Orthonormal basis of the inactive-subgradient directions kept by the constraint.

    Returns a |I| x (n - |A|) matrix B with V_IN' W_II B = 0.
    """
    inactive = np.sort(np.asarray(I, dtype=int).ravel())
    n_active = spec.p - inactive.size
    target_dim = spec.n - n_active
    if target_dim < 0:
        raise ConfigError("active set larger than n has no constrained density")
    M = basis.null_basis[inactive, :].T * spec.weights[inactive]
    B = null_space(M)
    if B.shape != (inactive.size, target_dim):
        raise NumericalError(
            "null-space dimension mismatch: design violates the "
            "every-n-columns-independent assumption"
        )
    return B


def rowspace_residual(
    state: AugmentedState, basis: SpectralBasis, spec: ProblemSpec
) -> float:
    """Max-norm violation of the row-space constraint on the subgradient."""
    v = basis.null_basis.T @ (spec.weights * state.subgradient())
    return float(np.max(np.abs(v), initial=0.0))


def log_det_rowspace_jacobian(
    A: np.ndarray,
    spec: ProblemSpec,
    basis: SpectralBasis,
    null_span: np.ndarray | None = None,
) -> float:
    """Log |det| of the n x n Jacobian of the row-space coordinate map.

    ``null_span`` overrides the internally computed orthonormal basis of
    the constrained inactive directions; any orthonormal basis of the same
    subspace gives the same value.
    """
    idx = np.sort(np.asarray(A, dtype=int).ravel())
    mask = np.zeros(spec.p, dtype=bool)
    mask[idx] = True
    inactive = np.nonzero(~mask)[0]
    B = inactive_null_basis(inactive, basis, spec) if null_span is None else null_span
    if B.shape != (inactive.size, spec.n - idx.size):
        raise ConfigError("null_span has the wrong shape for this active set")
    T = np.empty((spec.n, spec.n))
    T[:, : idx.size] = basis.row_basis.T @ spec.gram[:, idx]
    T[:, idx.size :] = spec.lam * (
        (basis.row_basis[inactive, :].T * spec.weights[inactive]) @ B
    )
    sign, logdet = np.linalg.slogdet(T)
    if sign == 0 or not np.isfinite(logdet):
        raise NumericalError("row-space Jacobian is singular")
    return float(logdet)


def log_density_rowspace(
    state: AugmentedState,
    beta: np.ndarray,
    model: ErrorModel,
    spec: ProblemSpec,
    basis: SpectralBasis,
    null_span: np.ndarray | None = None,
) -> float:
    """Log joint density in row-space coordinates for p > n.

    The state must satisfy the subgradient constraint to within ``C_TOL``.
    Supported error models: Gaussian, or an elliptical radial model of
    dimension n describing the whitened row-space score.  ``null_span``
    passes through to the Jacobian computation.
    """
    validate_state(state, spec.p)
    if spec.p <= spec.n:
        raise ConfigError("row-space density applies only to p > n designs")
    resid = rowspace_residual(state, basis, spec)
    if resid > C_TOL:
        raise DataError(
            f"subgradient violates the row-space constraint ({resid:.3e} > {C_TOL:g})"
        )
    r = basis.row_basis.T @ score_map(state, beta, spec)
    lam_vals = basis.eigenvalues
    qform = float(np.sum(r * r / lam_vals))
    n = spec.n
    if isinstance(model, Gaussian):
        if model.sigma2 <= 0:
            raise ConfigError("Gaussian variance must be positive")
        log_f = (
            -0.5 * n * math.log(2.0 * math.pi * model.sigma2 / n)
            - 0.5 * float(np.sum(np.log(lam_vals)))
            - 0.5 * n * qform / model.sigma2
        )
    elif isinstance(model, EmpiricalElliptical):
        if model.dim != n:
            raise ConfigError(
                f"elliptical model dimension {model.dim} does not match n={n}"
            )
        log_f = radial_log_pdf(model, math.sqrt(max(qform, 0.0))) - 0.5 * float(
            np.sum(np.log(lam_vals))
        )
    else:
        raise ConfigError(
            f"{type(model).__name__} error model is not supported on the p > n path"
        )
    return float(log_f) + log_det_rowspace_jacobian(
        state.active, spec, basis, null_span=null_span
    )


def sample_errors(
    model: ErrorModel, n: int, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``size`` noise vectors of length n from the error model."""
    if isinstance(model, Gaussian):
        if model.sigma2 < 0:
            raise ConfigError("Gaussian variance must be nonnegative to sample")
        return math.sqrt(model.sigma2) * rng.standard_normal((size, n))
    if isinstance(model, StudentT):
        if model.dof <= 0 or model.scale <= 0:
            raise ConfigError("StudentT dof and scale must be positive")
        z = rng.standard_normal((size, n))
        g = rng.chisquare(model.dof, size=size) / model.dof
        return math.sqrt(model.scale) * z / np.sqrt(g)[:, None]
    if isinstance(model, EmpiricalElliptical):
        if model.residual_pool is None:
            raise ConfigError(
                "elliptical model has no stored residual pool to resample from"
            )
        return rng.choice(model.residual_pool, size=(size, n), replace=True)
    raise ConfigError(f"unknown error model {type(model).__name__}")
