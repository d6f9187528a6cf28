"""Regression problem context: Gram matrix, spectral bases, determinant sweeps.

Everything downstream (solver, densities, samplers) works against the
objects defined here.  ``ProblemSpec`` is immutable and cheap to share
between chains; ``SweepState`` is the single-owner mutable companion that
tracks the active-set Gram inverse incrementally.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import cho_solve

from .errors import ConfigError, DataError, NumericalError

__all__ = [
    "ProblemSpec",
    "SpectralBasis",
    "SweepState",
    "build_problem",
    "spectral_decompose",
    "log_det_jacobian",
    "build_sweep_state",
    "sweep_det_ratio",
    "synthetic_dataset",
]


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Fixed design context for a weighted lasso problem.

    Attributes
    ----------
    X : ndarray of shape (n, p)
        Design matrix.
    weights : ndarray of shape (p,)
        Positive penalty weights (diagonal of the weight matrix).
    lam : float
        Penalty level, strictly positive.
    gram : ndarray of shape (p, p)
        Scaled Gram matrix ``X.T @ X / n``, symmetrized.
    rank_deficient : bool
        True when the numerical rank of ``X`` is below ``min(n, p)``.
    """

    X: np.ndarray
    weights: np.ndarray
    lam: float
    gram: np.ndarray
    rank_deficient: bool = False

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @cached_property
    def gram_cholesky(self) -> np.ndarray:
        """Lower Cholesky factor of the Gram matrix (requires p <= n)."""
        try:
            return np.linalg.cholesky(self.gram)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("Gram matrix is not positive definite") from exc

    @cached_property
    def gram_inv(self) -> np.ndarray:
        """Inverse Gram matrix, via the cached Cholesky factor."""
        inv = cho_solve((self.gram_cholesky, True), np.eye(self.p))
        return (inv + inv.T) / 2.0

    @cached_property
    def log_det_gram(self) -> float:
        return float(2.0 * np.sum(np.log(np.diag(self.gram_cholesky))))

    def gram_solve(self, u: np.ndarray) -> np.ndarray:
        """Solve ``gram @ x = u`` (vector or stacked columns)."""
        return cho_solve((self.gram_cholesky, True), u)


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Row-space/null-space eigenstructure of the Gram matrix when p > n.

    ``eigenvalues`` holds the n positive eigenvalues in descending order,
    ``row_basis`` the matching orthonormal eigenvectors (p x n), and
    ``null_basis`` an orthonormal basis of the null space (p x (p - n)).
    """

    eigenvalues: np.ndarray
    row_basis: np.ndarray
    null_basis: np.ndarray


@dataclass(frozen=True, eq=False)
class SweepState:
    """Tracked inverse and log-determinant of the active Gram block.

    ``active`` is kept sorted ascending.  Updates are copy-on-accept:
    :func:`sweep_det_ratio` never mutates its input, so a rejected proposal
    simply drops the returned state.
    """

    active: np.ndarray
    inv_caa: np.ndarray
    logdet_caa: float


def build_problem(X: np.ndarray, w: np.ndarray | float, lam: float) -> ProblemSpec:
    """Validate inputs and assemble the immutable problem context.

    Parameters
    ----------
    X : array_like of shape (n, p)
        Design matrix.
    w : array_like of shape (p,) or scalar
        Positive penalty weights; a scalar is broadcast to all coordinates.
    lam : float
        Penalty level, strictly positive.

    Raises
    ------
    DataError
        If ``X`` is not a finite 2-D array or shapes disagree.
    ConfigError
        If any weight or ``lam`` is not strictly positive.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise DataError(f"design matrix must be 2-D and nonempty, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DataError("design matrix contains non-finite entries")
    n, p = X.shape

    w = np.asarray(w, dtype=float)
    if w.ndim == 0:
        w = np.full(p, float(w))
    if w.shape != (p,):
        raise DataError(f"weights must have shape ({p},), got {w.shape}")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ConfigError("all penalty weights must be finite and positive")

    lam = float(lam)
    if not np.isfinite(lam) or lam <= 0:
        raise ConfigError(f"penalty level must be finite and positive, got {lam}")

    gram = X.T @ X / n
    gram = (gram + gram.T) / 2.0

    rank = int(np.linalg.matrix_rank(X))
    rank_deficient = rank < min(n, p)
    if rank_deficient:
        warnings.warn(
            "design matrix is numerically rank-deficient; "
            "uniqueness of the lasso solution is not guaranteed",
            RuntimeWarning,
            stacklevel=2,
        )

    return ProblemSpec(X=X, weights=w, lam=lam, gram=gram, rank_deficient=rank_deficient)


def eigen_cut(spec: ProblemSpec, eigenvalues: np.ndarray) -> float:
    """Numerical-rank threshold separating row-space from null eigenvalues."""
    return max(spec.n, spec.p) * np.finfo(float).eps * float(np.max(eigenvalues))


def spectral_decompose(spec: ProblemSpec) -> SpectralBasis:
    """Split the Gram eigenstructure into row space and null space (p > n).

    Raises
    ------
    ConfigError
        If p <= n (the low-dimensional path has no use for this object).
    NumericalError
        If the number of eigenvalues above the rank threshold is not
        exactly n, i.e. the design is rank-deficient.
    """
    if spec.p <= spec.n:
        raise ConfigError("spectral basis is only defined for p > n designs")
    vals, vecs = np.linalg.eigh(spec.gram)
    cut = eigen_cut(spec, vals)
    above = vals > cut
    if int(above.sum()) != spec.n:
        raise NumericalError(
            f"expected {spec.n} eigenvalues above the rank threshold, "
            f"found {int(above.sum())}; design appears rank-deficient"
        )
    order = np.argsort(vals[above])[::-1]
    row_vals = vals[above][order]
    row_basis = vecs[:, above][:, order]
    null_basis = vecs[:, ~above]
    return SpectralBasis(eigenvalues=row_vals, row_basis=row_basis, null_basis=null_basis)


def _as_index_array(A: np.ndarray, p: int) -> np.ndarray:
    idx = np.asarray(A, dtype=int).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= p):
        raise ConfigError(f"active-set indices must lie in [0, {p})")
    if np.unique(idx).size != idx.size:
        raise ConfigError("active-set indices must be distinct")
    return np.sort(idx)


def log_det_jacobian(A: np.ndarray, spec: ProblemSpec) -> float:
    """Log absolute determinant of the state-to-score Jacobian for active set A.

    Equals ``log det C_AA + |I| log(lam) + sum_{j notin A} log w_j`` where I
    is the inactive set.  The active Gram block must be positive definite.
    """
    idx = _as_index_array(A, spec.p)
    mask = np.zeros(spec.p, dtype=bool)
    mask[idx] = True
    if idx.size:
        sign, logdet = np.linalg.slogdet(spec.gram[np.ix_(idx, idx)])
        if sign <= 0 or not np.isfinite(logdet):
            raise NumericalError("active Gram block is singular")
    else:
        logdet = 0.0
    n_inactive = spec.p - idx.size
    return float(logdet + n_inactive * np.log(spec.lam) + np.log(spec.weights[~mask]).sum())


def build_sweep_state(spec: ProblemSpec, active: np.ndarray) -> SweepState:
    """Construct the tracked inverse from scratch for the given active set."""
    idx = _as_index_array(active, spec.p)
    if idx.size == 0:
        return SweepState(active=idx, inv_caa=np.empty((0, 0)), logdet_caa=0.0)
    caa = spec.gram[np.ix_(idx, idx)]
    try:
        L = np.linalg.cholesky(caa)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("active Gram block is not positive definite") from exc
    inv = cho_solve((L, True), np.eye(idx.size))
    inv = (inv + inv.T) / 2.0
    logdet = float(2.0 * np.sum(np.log(np.diag(L))))
    return SweepState(active=idx, inv_caa=inv, logdet_caa=logdet)


def sweep_det_ratio(
    state: SweepState, spec: ProblemSpec, j: int, move: str
) -> tuple[float, SweepState]:
    """Determinant ratio |det D(A')| / |det D(A)| for a one-coordinate move.

    ``move`` is ``"add"`` (j joins the active set) or ``"remove"``.  Returns
    the ratio together with a new state tracking the updated inverse; the
    input state is left untouched so rejected proposals can discard the
    result.

    Raises
    ------
    NumericalError
        If the rank-one update loses positive definiteness (callers should
        fall back to a from-scratch rebuild).
    """
    j = int(j)
    if j < 0 or j >= spec.p:
        raise ConfigError(f"coordinate {j} out of range [0, {spec.p})")
    active = state.active
    k = active.size

    if move == "add":
        if j in active:
            raise ConfigError(f"coordinate {j} is already active")
        cjj = spec.gram[j, j]
        if k == 0:
            if cjj <= 0:
                raise NumericalError("nonpositive diagonal in rank-one update")
            new_active = np.array([j], dtype=int)
            new_inv = np.array([[1.0 / cjj]])
            new_logdet = float(np.log(cjj))
            ratio = cjj / (spec.lam * spec.weights[j])
            return ratio, SweepState(new_active, new_inv, new_logdet)
        cbj = spec.gram[active, j]
        u = state.inv_caa @ cbj
        schur = float(cjj - cbj @ u)
        if schur <= 0 or not np.isfinite(schur):
            raise NumericalError("nonpositive Schur complement in sweep add")
        pos = int(np.searchsorted(active, j))
        # Block-inverse with j appended last, then permuted into sorted order.
        grown = np.empty((k + 1, k + 1))
        grown[:k, :k] = state.inv_caa + np.outer(u, u) / schur
        grown[:k, k] = -u / schur
        grown[k, :k] = -u / schur
        grown[k, k] = 1.0 / schur
        perm = np.concatenate([np.arange(pos), [k], np.arange(pos, k)])
        new_inv = grown[np.ix_(perm, perm)]
        new_active = np.insert(active, pos, j)
        new_logdet = state.logdet_caa + float(np.log(schur))
        ratio = schur / (spec.lam * spec.weights[j])
        return ratio, SweepState(new_active, new_inv, new_logdet)

    if move == "remove":
        pos_arr = np.nonzero(active == j)[0]
        if pos_arr.size == 0:
            raise ConfigError(f"coordinate {j} is not active")
        pos = int(pos_arr[0])
        d = float(state.inv_caa[pos, pos])
        if d <= 0 or not np.isfinite(d):
            raise NumericalError("nonpositive pivot in sweep remove")
        keep = np.arange(k) != pos
        col = state.inv_caa[keep, pos]
        new_inv = state.inv_caa[np.ix_(keep, keep)] - np.outer(col, col) / d
        new_inv = (new_inv + new_inv.T) / 2.0
        new_active = active[keep]
        new_logdet = state.logdet_caa + float(np.log(d))
        ratio = d * spec.lam * spec.weights[j]
        return ratio, SweepState(new_active, new_inv, new_logdet)

    raise ConfigError(f"unknown sweep move {move!r}")


def refresh_sweep_state(spec: ProblemSpec, state: SweepState) -> SweepState:
    """Rebuild the tracked inverse from scratch to shed accumulated drift."""
    return build_sweep_state(spec, state.active)


def synthetic_dataset(
    n: int,
    p: int,
    rho: float = 0.25,
    sigma2: float = 1.0,
    signal: int | None = None,
    amplitude: float = 1.0,
    seed=0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Equicorrelated Gaussian design with a sparse two-sign coefficient vector.

    Rows of X are N(0, S) with unit diagonal and constant off-diagonal
    ``rho``.  The first ``signal`` coordinates of the truth carry
    ``+amplitude`` (first half) and ``-amplitude`` (second half); the rest
    are zero.  Returns (X, y, beta0) with y = X beta0 + noise.
    """
    from .rng import generator

    if n < 1 or p < 1:
        raise ConfigError("n and p must be positive")
    if not -1.0 / max(p - 1, 1) < rho < 1.0:
        raise ConfigError("rho outside the positive-definite range")
    if sigma2 < 0:
        raise ConfigError("noise variance must be nonnegative")
    if signal is None:
        signal = min(10, p)
    if not 0 <= signal <= p:
        raise ConfigError(f"signal size must be in [0, {p}]")

    rng = generator(seed)
    z = rng.standard_normal((n, p))
    if rho >= 0:
        shared = rng.standard_normal((n, 1))
        X = np.sqrt(1.0 - rho) * z + np.sqrt(rho) * shared
    else:
        cov = (1.0 - rho) * np.eye(p) + rho * np.ones((p, p))
        X = z @ np.linalg.cholesky(cov).T
    beta0 = np.zeros(p)
    head = (signal + 1) // 2
    beta0[:head] = amplitude
    beta0[head:signal] = -amplitude
    y = X @ beta0 + np.sqrt(sigma2) * rng.standard_normal(n)
    return X, y, beta0
