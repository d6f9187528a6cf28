"""Weighted lasso solver with coordinate descent and KKT-residual stopping.

The solver works on the Gram scale: it needs only ``C = X'X/n`` and the
correlation vector ``X'y/n``, which lets the same core serve the data-space
problem, the posterior decision draw, and recentred objectives.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ConvergenceError, DataError, NumericalError
from .problem import ProblemSpec

__all__ = [
    "LassoSolution",
    "solve_lasso",
    "solve_lasso_gram",
    "subgradient_of",
    "lambda_max",
    "lambda_grid",
]

KKT_TOL = 1e-8
S_TOL = 1e-6
MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class LassoSolution:
    """Minimizer of the penalized loss together with its subgradient.

    ``subgrad`` equals the sign of ``beta_hat`` on the active set and lies
    in [-1, 1] elsewhere; ``kkt_residual`` is the max-norm defect of the
    stationarity condition.
    """

    beta_hat: np.ndarray
    subgrad: np.ndarray
    active: np.ndarray
    kkt_residual: float


def _kkt_residual_vec(
    grad: np.ndarray, beta: np.ndarray, lam_w: np.ndarray
) -> np.ndarray:
    """Per-coordinate KKT defect; ``grad`` is ``xty - C @ beta``."""
    res = np.empty_like(grad)
    nz = beta != 0
    res[nz] = np.abs(grad[nz] - lam_w[nz] * np.sign(beta[nz]))
    res[~nz] = np.maximum(np.abs(grad[~nz]) - lam_w[~nz], 0.0)
    return res


def _cd_pass(
    gram: np.ndarray,
    xty: np.ndarray,
    lam_w: np.ndarray,
    beta: np.ndarray,
    q: np.ndarray,
    idx: np.ndarray,
) -> None:
    """One coordinate-descent pass over ``idx`` in ascending order, in place.

    ``q`` tracks ``gram @ beta`` and is updated alongside ``beta``.
    """
    for j in idx:
        cjj = gram[j, j]
        if cjj <= 0.0:
            # Zero column: the coordinate cannot move the fit.
            if beta[j] != 0.0:
                q -= gram[:, j] * beta[j]
                beta[j] = 0.0
            continue
        rho = xty[j] - q[j] + cjj * beta[j]
        shrunk = abs(rho) - lam_w[j]
        new = np.sign(rho) * shrunk / cjj if shrunk > 0.0 else 0.0
        if new != beta[j]:
            q += gram[:, j] * (new - beta[j])
            beta[j] = new


def solve_lasso_gram(
    gram: np.ndarray,
    xty: np.ndarray,
    weights: np.ndarray,
    lam: float,
    kkt_tol: float = KKT_TOL,
    max_iter: int = MAX_ITER,
    beta0: np.ndarray | None = None,
) -> tuple[np.ndarray, float]:
    """Minimize ``beta'C beta/2 - xty'beta + lam * sum(w |beta|)``.

    Cyclic coordinate descent over all coordinates, with inner passes
    restricted to the current active set until it stabilizes.  Convergence
    is declared on the max-norm KKT residual, the same quantity the density
    machinery depends on.  Lower-index coordinates update first within every
    pass, which resolves boundary ties deterministically.

    Returns the minimizer and its KKT residual.

    Raises
    ------
    ConvergenceError
        After ``max_iter`` passes without reaching ``kkt_tol``; the error
        carries the best iterate and residual.
    """
    p = xty.shape[0]
    lam_w = lam * np.asarray(weights, dtype=float)
    beta = np.zeros(p) if beta0 is None else np.array(beta0, dtype=float)
    q = gram @ beta if beta0 is not None else np.zeros(p)
    all_idx = np.arange(p)

    sweeps = 0
    while sweeps < max_iter:
        _cd_pass(gram, xty, lam_w, beta, q, all_idx)
        sweeps += 1
        # Polish on the current active set until it stops moving or shrinks.
        while sweeps < max_iter:
            active = np.nonzero(beta)[0]
            if active.size == 0:
                break
            before = beta[active].copy()
            _cd_pass(gram, xty, lam_w, beta, q, active)
            sweeps += 1
            moved = np.max(np.abs(beta[active] - before)) if active.size else 0.0
            if moved <= 1e-15 or np.any(beta[active] == 0.0):
                break
        q = gram @ beta
        res = float(np.max(_kkt_residual_vec(xty - q, beta, lam_w), initial=0.0))
        if res <= kkt_tol:
            return beta, res

    q = gram @ beta
    res = float(np.max(_kkt_residual_vec(xty - q, beta, lam_w), initial=0.0))
    if res <= kkt_tol:
        return beta, res
    raise ConvergenceError(
        f"coordinate descent did not reach tolerance {kkt_tol:g} "
        f"after {max_iter} passes (residual {res:.3e})",
        beta=beta,
        residual=res,
    )


def _snap_subgradient(
    spec: ProblemSpec, beta: np.ndarray, raw: np.ndarray, s_tol: float
) -> np.ndarray:
    """Pin active coordinates to exact signs and clip the rest into [-1, 1]."""
    s = raw.copy()
    nz = beta != 0
    if np.any(np.abs(raw[nz] - np.sign(beta[nz])) > s_tol):
        raise DataError("subgradient disagrees with coefficient signs; not a minimizer")
    if np.any(np.abs(raw[~nz]) > 1.0 + s_tol):
        raise DataError("inactive subgradient exceeds 1; not a minimizer")
    s[nz] = np.sign(beta[nz])
    s[~nz] = np.clip(raw[~nz], -1.0, 1.0)
    return s


def solve_lasso(
    spec: ProblemSpec,
    y: np.ndarray,
    kkt_tol: float = KKT_TOL,
    max_iter: int = MAX_ITER,
) -> LassoSolution:
    """Solve the weighted lasso for data ``y`` and extract (beta_hat, S)."""
    y = np.asarray(y, dtype=float)
    if y.shape != (spec.n,):
        raise DataError(f"response must have shape ({spec.n},), got {y.shape}")
    if not np.all(np.isfinite(y)):
        raise DataError("response contains non-finite entries")
    xty = spec.X.T @ y / spec.n
    beta, res = solve_lasso_gram(
        spec.gram, xty, spec.weights, spec.lam, kkt_tol=kkt_tol, max_iter=max_iter
    )
    raw = (xty - spec.gram @ beta) / (spec.lam * spec.weights)
    s = _snap_subgradient(spec, beta, raw, S_TOL)
    return LassoSolution(
        beta_hat=beta,
        subgrad=s,
        active=np.nonzero(beta)[0],
        kkt_residual=res,
    )


def subgradient_of(spec: ProblemSpec, y: np.ndarray, beta_hat: np.ndarray) -> np.ndarray:
    """Subgradient implied by a minimizer: ``X'(y - X beta)/ (n lam w)``.

    Raises
    ------
    DataError
        If the implied vector is inconsistent with ``beta_hat`` being a
        minimizer (sign mismatch on the support, or magnitude above 1
        beyond tolerance off the support).
    """
    y = np.asarray(y, dtype=float)
    beta_hat = np.asarray(beta_hat, dtype=float)
    raw = spec.X.T @ (y - spec.X @ beta_hat) / (spec.n * spec.lam * spec.weights)
    return _snap_subgradient(spec, beta_hat, raw, S_TOL)


def lambda_max(spec: ProblemSpec, y: np.ndarray) -> float:
    """Smallest penalty level at which the lasso solution is identically zero."""
    y = np.asarray(y, dtype=float)
    return float(np.max(np.abs(spec.X.T @ y) / (spec.n * spec.weights), initial=0.0))


def lambda_grid(
    spec: ProblemSpec, y: np.ndarray, num: int = 50, min_frac: float = 0.01
) -> np.ndarray:
    """Log-spaced penalty grid from ``lambda_max`` down to a fraction of it."""
    if num < 1:
        raise ConfigError("grid needs at least one point")
    if not 0.0 < min_frac <= 1.0:
        raise ConfigError("min_frac must lie in (0, 1]")
    top = lambda_max(spec, y)
    if top <= 0:
        raise NumericalError("lambda_max is zero; no meaningful penalty grid")
    if num == 1:
        return np.array([top])
    return np.geomspace(top, min_frac * top, num)
