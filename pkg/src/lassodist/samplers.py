"""Samplers for the augmented-estimator distribution.

Four routes: exact direct sampling (simulate noise, re-solve), a
Metropolis-Hastings chain mixing coefficient/subgradient updates with
add/drop moves across active sets, the same chain conditioned on a fixed
active set, and a random-design variant that refreshes the design matrix
by resampling its rows.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import ndtr

from .density import (
    AugmentedState,
    ErrorModel,
    log_error_density_from_qform,
    sample_errors,
    state_from_arrays,
    validate_state,
)
from .errors import ConfigError, DataError, NumericalError
from .problem import ProblemSpec, SweepState, build_sweep_state, sweep_det_ratio
from .rng import Seed, generator, seed_sequence
from .solver import solve_lasso

__all__ = [
    "SamplerConfig",
    "Chain",
    "default_sampler_config",
    "direct_sample",
    "mh_sample",
    "conditional_mh_sample",
    "random_design_mh_sample",
    "write_chain_csv",
    "read_chain_csv",
    "write_chain_meta",
]

REFRESH_EVERY = 1000

COEF_UPDATE = "coef_update"
SUBGRAD_UPDATE = "subgrad_update"
DROP_COORD = "drop_coord"
ADD_COORD = "add_coord"
DESIGN_UPDATE = "design_update"
MOVE_KINDS = (COEF_UPDATE, SUBGRAD_UPDATE, DROP_COORD, ADD_COORD, DESIGN_UPDATE)


@dataclass(frozen=True, eq=False)
class SamplerConfig:
    """Chain length, proposal scales and selection weights for the MH samplers.

    ``K`` coordinates per iteration receive add/drop proposals, chosen
    without replacement with probability proportional to ``alpha``; the
    rest receive coefficient/subgradient updates with scales ``tau``.
    ``equilibrium_init`` starts the chain from one exact draw and forces
    ``burn_in`` to zero.
    """

    K: int
    alpha: np.ndarray
    tau: np.ndarray
    iters: int
    burn_in: int
    seed: int
    equilibrium_init: bool = False


@dataclass(eq=False)
class Chain:
    """Sampler output: kept states in dense arrays plus acceptance tallies.

    Row i of ``thetas`` holds the mixed coordinates of the i-th kept state
    (coefficient where ``active`` is True, subgradient value elsewhere);
    ``iterations`` maps rows to sweep indices of the generating run.
    """

    thetas: np.ndarray
    active: np.ndarray
    iterations: np.ndarray
    accept_counts: dict[str, int] = field(default_factory=dict)
    proposal_counts: dict[str, int] = field(default_factory=dict)
    seed: int | None = None
    max_kkt_residual: float | None = None

    def __len__(self) -> int:
        return self.thetas.shape[0]

    @property
    def p(self) -> int:
        return self.thetas.shape[1]

    def state(self, i: int) -> AugmentedState:
        return state_from_arrays(self.thetas[i], self.active[i])

    def states(self):
        for i in range(len(self)):
            yield self.state(i)

    def beta_matrix(self) -> np.ndarray:
        """Coefficient vectors, zeros on inactive coordinates; shape (L, p)."""
        return np.where(self.active, self.thetas, 0.0)

    def subgrad_matrix(self) -> np.ndarray:
        return np.where(self.active, np.sign(self.thetas), self.thetas)

    def acceptance_rate(self, kind: str) -> float:
        tried = self.proposal_counts.get(kind, 0)
        return self.accept_counts.get(kind, 0) / tried if tried else math.nan


def default_sampler_config(
    spec: ProblemSpec,
    seed: int,
    iters: int = 5500,
    burn_in: int = 500,
    beta_ref: np.ndarray | None = None,
    sigma2_hat: float = 1.0,
    K: int | None = None,
    equilibrium_init: bool = False,
) -> SamplerConfig:
    """Recommended proposal tuning.

    With a reference estimate, selection weights favor coordinates whose
    coefficients are small relative to their unpenalized standard errors
    (those switch models most often), and proposal scales are twice those
    standard errors.  Without one, weights are uniform and scales fall back
    to ``2 * sigma_hat / sqrt(n * C_jj)``.
    """
    p = spec.p
    k = K if K is not None else math.ceil(p / 5)
    if beta_ref is not None and spec.p <= spec.n:
        zeta = np.sqrt(sigma2_hat * np.diag(spec.gram_inv) / spec.n)
        omega = ndtr(-np.abs(np.asarray(beta_ref, dtype=float)) / zeta)
        omega0 = float(omega.sum()) / (5.0 * p)
        alpha = omega + omega0
        tau = 2.0 * zeta
    else:
        alpha = np.ones(p)
        tau = 2.0 * math.sqrt(sigma2_hat) / np.sqrt(spec.n * np.diag(spec.gram))
    alpha = alpha / alpha.sum()
    return SamplerConfig(
        K=k,
        alpha=alpha,
        tau=tau,
        iters=iters,
        burn_in=burn_in,
        seed=seed,
        equilibrium_init=equilibrium_init,
    )


def _validate_config(config: SamplerConfig, p: int) -> None:
    if not 1 <= config.K <= p:
        raise ConfigError(f"K must be in [1, {p}], got {config.K}")
    alpha = np.asarray(config.alpha, dtype=float)
    tau = np.asarray(config.tau, dtype=float)
    if alpha.shape != (p,) or np.any(alpha <= 0):
        raise ConfigError("alpha must be a p-vector of positive selection weights")
    if tau.shape != (p,) or np.any(tau <= 0):
        raise ConfigError("tau must be a p-vector of positive proposal scales")
    if config.iters < 1 or config.burn_in < 0 or config.burn_in >= config.iters:
        raise ConfigError("need 0 <= burn_in < iters")


def direct_sample(
    spec: ProblemSpec,
    beta: np.ndarray,
    model: ErrorModel,
    L: int,
    seed: Seed,
) -> Chain:
    """Exact independent draws: simulate noise, solve, keep (beta_hat, S).

    Valid in both regimes (p <= n and p > n).
    """
    if L < 1:
        raise ConfigError("need at least one draw")
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (spec.p,):
        raise DataError(f"beta must have shape ({spec.p},), got {beta.shape}")
    rng = generator(seed)
    noise = sample_errors(model, spec.n, L, rng)
    mean = spec.X @ beta
    thetas = np.empty((L, spec.p))
    active = np.empty((L, spec.p), dtype=bool)
    worst = 0.0
    for i in range(L):
        sol = solve_lasso(spec, mean + noise[i])
        mask = sol.beta_hat != 0
        thetas[i] = np.where(mask, sol.beta_hat, sol.subgrad)
        active[i] = mask
        if sol.kkt_residual > worst:
            worst = sol.kkt_residual
    return Chain(
        thetas=thetas,
        active=active,
        iterations=np.arange(L),
        seed=seed if isinstance(seed, int) else None,
        max_kkt_residual=worst,
    )


class _MhEngine:
    """Mutable chain state shared by the MH samplers.

    Tracks the score image ``H`` of the current state, its Gram-inverse
    image ``G`` (so the Mahalanobis form is one dot product away), and the
    sweep state for active-block determinant ratios.  Proposals build the
    candidate H/G in O(p) and mutate only on acceptance.
    """

    def __init__(
        self,
        beta: np.ndarray,
        model: ErrorModel,
        tau: np.ndarray,
        track_dets: bool = True,
    ) -> None:
        self.beta = np.asarray(beta, dtype=float)
        self.model = model
        self.tau = np.asarray(tau, dtype=float)
        self.track_dets = track_dets
        self.accepts = dict.fromkeys(MOVE_KINDS, 0)
        self.attempts = dict.fromkeys(MOVE_KINDS, 0)
        self.model_moves = 0
        self.spec: ProblemSpec | None = None
        self.theta: np.ndarray | None = None
        self.active: np.ndarray | None = None

    def set_design(self, spec: ProblemSpec) -> None:
        spec.gram_cholesky  # noqa: B018 - fail fast if the Gram is not PD
        self.spec = spec
        if self.theta is not None:
            self.rebuild()

    def set_state(self, theta: np.ndarray, active: np.ndarray) -> None:
        self.theta = np.array(theta, dtype=float)
        self.active = np.array(active, dtype=bool)
        self.rebuild()

    def rebuild(self) -> None:
        spec = self.spec
        beta_hat = np.where(self.active, self.theta, 0.0)
        s_full = np.where(self.active, np.sign(self.theta), self.theta)
        self.H = spec.gram @ (beta_hat - self.beta) + spec.lam * spec.weights * s_full
        self.G = spec.gram_inv @ self.H
        self.qform = float(self.H @ self.G)
        self.loglik = log_error_density_from_qform(self.model, self.qform, spec)
        if self.track_dets:
            self.sweep = build_sweep_state(spec, np.nonzero(self.active)[0])

    def log_posterior(self) -> float:
        """Log target up to a constant (used by design-refresh acceptance)."""
        value = self.loglik
        if self.track_dets:
            value += self.sweep.logdet_caa
        return value

    def _candidate_loglik(self, H_new: np.ndarray, G_new: np.ndarray) -> float:
        return log_error_density_from_qform(
            self.model, float(H_new @ G_new), self.spec
        )

    def _accept(self, H_new, G_new, loglik_new, kind) -> None:
        self.H = H_new
        self.G = G_new
        self.qform = float(H_new @ G_new)
        self.loglik = loglik_new
        self.accepts[kind] += 1

    def _bump_refresh(self) -> None:
        self.model_moves += 1
        if self.model_moves % REFRESH_EVERY == 0:
            self.rebuild()

    def coef_update(self, j: int, b_new: float, log_u: float) -> None:
        self.attempts[COEF_UPDATE] += 1
        if b_new == 0.0:
            return
        spec = self.spec
        b_old = self.theta[j]
        ds = np.sign(b_new) - np.sign(b_old)
        H_new = self.H + spec.gram[:, j] * (b_new - b_old)
        G_new = self.G + (b_new - b_old) * _unit_increment(spec.p, j)
        if ds != 0.0:
            lw = spec.lam * spec.weights[j]
            H_new[j] += lw * ds
            G_new = G_new + lw * ds * spec.gram_inv[:, j]
        loglik_new = self._candidate_loglik(H_new, G_new)
        if log_u <= loglik_new - self.loglik:
            self.theta[j] = b_new
            self._accept(H_new, G_new, loglik_new, COEF_UPDATE)

    def subgrad_update(self, j: int, s_new: float, log_u: float) -> None:
        self.attempts[SUBGRAD_UPDATE] += 1
        spec = self.spec
        lw = spec.lam * spec.weights[j]
        ds = s_new - self.theta[j]
        H_new = self.H.copy()
        H_new[j] += lw * ds
        G_new = self.G + lw * ds * spec.gram_inv[:, j]
        loglik_new = self._candidate_loglik(H_new, G_new)
        if log_u <= loglik_new - self.loglik:
            self.theta[j] = s_new
            self._accept(H_new, G_new, loglik_new, SUBGRAD_UPDATE)

    def _det_move(self, j: int, move: str) -> tuple[float, SweepState] | None:
        """Full determinant ratio for add/remove, with rebuild fallback."""
        spec = self.spec
        try:
            return sweep_det_ratio(self.sweep, spec, j, move)
        except NumericalError:
            mask = self.active.copy()
            mask[j] = move == "add"
            try:
                fresh = build_sweep_state(spec, np.nonzero(mask)[0])
            except NumericalError:
                return None
            log_cratio = fresh.logdet_caa - self.sweep.logdet_caa
            lw = math.log(spec.lam * spec.weights[j])
            log_ratio = log_cratio + (lw if move == "remove" else -lw)
            return math.exp(log_ratio), fresh

    def drop_coord(self, j: int, s_new: float, log_u: float) -> None:
        self.attempts[DROP_COORD] += 1
        spec = self.spec
        det = self._det_move(j, "remove")
        if det is None:
            return
        ratio_det, sweep_new = det
        b_old = self.theta[j]
        lw = spec.lam * spec.weights[j]
        ds = s_new - np.sign(b_old)
        H_new = self.H - spec.gram[:, j] * b_old
        H_new[j] += lw * ds
        G_new = self.G + lw * ds * spec.gram_inv[:, j]
        G_new[j] -= b_old
        loglik_new = self._candidate_loglik(H_new, G_new)
        tau_j = self.tau[j]
        log_ratio = (
            loglik_new
            - self.loglik
            + math.log(ratio_det)
            + _normal_logpdf(b_old, tau_j)
            - math.log(0.5)
        )
        if log_u <= log_ratio:
            self.theta[j] = s_new
            self.active[j] = False
            self.sweep = sweep_new
            self._accept(H_new, G_new, loglik_new, DROP_COORD)
            self._bump_refresh()

    def add_coord(self, j: int, b_new: float, log_u: float) -> None:
        self.attempts[ADD_COORD] += 1
        if b_new == 0.0:
            return
        spec = self.spec
        det = self._det_move(j, "add")
        if det is None:
            return
        ratio_det, sweep_new = det
        s_old = self.theta[j]
        lw = spec.lam * spec.weights[j]
        ds = np.sign(b_new) - s_old
        H_new = self.H + spec.gram[:, j] * b_new
        H_new[j] += lw * ds
        G_new = self.G + lw * ds * spec.gram_inv[:, j]
        G_new[j] += b_new
        loglik_new = self._candidate_loglik(H_new, G_new)
        tau_j = self.tau[j]
        log_ratio = (
            loglik_new
            - self.loglik
            + math.log(ratio_det)
            + math.log(0.5)
            - _normal_logpdf(b_new, tau_j)
        )
        if log_u <= log_ratio:
            self.theta[j] = b_new
            self.active[j] = True
            self.sweep = sweep_new
            self._accept(H_new, G_new, loglik_new, ADD_COORD)
            self._bump_refresh()

    def mixed_iteration(
        self,
        model_mask: np.ndarray,
        normals: np.ndarray,
        unifs: np.ndarray,
        log_u: np.ndarray,
    ) -> None:
        """One sweep: add/drop on the selected coordinates, then the rest."""
        p = self.theta.shape[0]
        for j in range(p):
            if not model_mask[j]:
                continue
            if self.active[j]:
                self.drop_coord(j, unifs[j], log_u[j])
            else:
                self.add_coord(j, self.tau[j] * normals[j], log_u[j])
        for j in range(p):
            if model_mask[j]:
                continue
            if self.active[j]:
                self.coef_update(j, self.theta[j] + self.tau[j] * normals[j], log_u[j])
            else:
                self.subgrad_update(j, unifs[j], log_u[j])

    def conditional_iteration(
        self, normals: np.ndarray, unifs: np.ndarray, log_u: np.ndarray
    ) -> None:
        """One sweep with the active set frozen (no add/drop moves)."""
        p = self.theta.shape[0]
        for j in range(p):
            if self.active[j]:
                self.coef_update(j, self.theta[j] + self.tau[j] * normals[j], log_u[j])
            else:
                self.subgrad_update(j, unifs[j], log_u[j])


def _unit_increment(p: int, j: int) -> np.ndarray:
    e = np.zeros(p)
    e[j] = 1.0
    return e


def _normal_logpdf(x: float, sd: float) -> float:
    return -0.5 * math.log(2.0 * math.pi) - math.log(sd) - 0.5 * (x / sd) ** 2


def _weighted_subset(
    log_alpha: np.ndarray, K: int, rng: np.random.Generator
) -> np.ndarray:
    """Boolean mask of K coordinates sampled without replacement prop. to alpha.

    Top-K of Gumbel-perturbed log-weights is distributed exactly as
    sequential draws without replacement with renormalization.
    """
    p = log_alpha.shape[0]
    u = rng.random(p)
    with np.errstate(divide="ignore"):
        keys = log_alpha - np.log(-np.log(u))
    mask = np.zeros(p, dtype=bool)
    if K >= p:
        mask[:] = True
        return mask
    mask[np.argpartition(keys, p - K)[p - K :]] = True
    return mask


def _initial_state(
    spec: ProblemSpec,
    beta: np.ndarray,
    model: ErrorModel,
    config: SamplerConfig,
    init: AugmentedState | None,
    init_seed: np.random.SeedSequence,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Resolve the starting point and effective burn-in."""
    if config.equilibrium_init:
        start = direct_sample(spec, beta, model, 1, init_seed)
        return start.thetas[0], start.active[0], 0
    if init is None:
        # Deterministic default: start at the centering vector itself,
        # inactive subgradients at zero.
        mask = np.asarray(beta, dtype=float) != 0.0
        theta = np.where(mask, beta, 0.0)
        return theta, mask, config.burn_in
    validate_state(init, spec.p)
    mask = init.active_mask()
    return init.theta(), mask, config.burn_in


def _run_chain(
    engine: _MhEngine,
    config: SamplerConfig,
    burn_in: int,
    rng: np.random.Generator,
    conditional: bool,
    design_step=None,
) -> Chain:
    p = engine.theta.shape[0]
    log_alpha = np.log(np.asarray(config.alpha, dtype=float))
    kept = config.iters - burn_in
    thetas = np.empty((kept, p))
    active = np.empty((kept, p), dtype=bool)
    row = 0
    for t in range(1, config.iters + 1):
        if design_step is not None:
            design_step(engine)
        if conditional:
            normals = rng.standard_normal(p)
            unifs = rng.uniform(-1.0, 1.0, p)
            log_u = np.log(rng.random(p))
            engine.conditional_iteration(normals, unifs, log_u)
        else:
            model_mask = _weighted_subset(log_alpha, config.K, rng)
            normals = rng.standard_normal(p)
            unifs = rng.uniform(-1.0, 1.0, p)
            log_u = np.log(rng.random(p))
            engine.mixed_iteration(model_mask, normals, unifs, log_u)
        if t > burn_in:
            thetas[row] = engine.theta
            active[row] = engine.active
            row += 1
    tried = {k: v for k, v in engine.attempts.items() if v > 0}
    return Chain(
        thetas=thetas,
        active=active,
        iterations=np.arange(burn_in + 1, config.iters + 1),
        accept_counts={k: engine.accepts.get(k, 0) for k in tried},
        proposal_counts=tried,
        seed=config.seed if isinstance(config.seed, int) else None,
    )


def mh_sample(
    spec: ProblemSpec,
    beta: np.ndarray,
    model: ErrorModel,
    config: SamplerConfig,
    init: AugmentedState | None = None,
) -> Chain:
    """Metropolis-Hastings chain over the full augmented space (p <= n).

    Each iteration proposes add/drop moves on K weighted-sampled
    coordinates and coefficient/subgradient updates on the others.
    """
    if spec.p > spec.n:
        raise ConfigError("the MH sampler requires p <= n; use direct_sample instead")
    _validate_config(config, spec.p)
    beta = np.asarray(beta, dtype=float)
    init_seq, moves_seq, _design_seq = seed_sequence(config.seed).spawn(3)
    theta0, active0, burn_in = _initial_state(spec, beta, model, config, init, init_seq)
    engine = _MhEngine(beta, model, config.tau)
    engine.set_design(spec)
    engine.set_state(theta0, active0)
    return _run_chain(engine, config, burn_in, generator(moves_seq), conditional=False)


def conditional_mh_sample(
    spec: ProblemSpec,
    beta: np.ndarray,
    model: ErrorModel,
    A_star: np.ndarray,
    config: SamplerConfig,
    init: AugmentedState | None = None,
    max_init_draws: int = 10_000,
) -> Chain:
    """MH chain conditioned on a fixed active set.

    Only coefficient and subgradient updates are proposed, so no
    determinant evaluations occur.  With ``equilibrium_init`` the starting
    point is found by rejection: exact draws until one hits ``A_star``.
    """
    if spec.p > spec.n:
        raise ConfigError("the conditional sampler requires p <= n")
    _validate_config(config, spec.p)
    beta = np.asarray(beta, dtype=float)
    target = np.zeros(spec.p, dtype=bool)
    target[np.asarray(A_star, dtype=int)] = True

    init_seq, moves_seq, _design_seq = seed_sequence(config.seed).spawn(3)
    burn_in = config.burn_in
    if config.equilibrium_init:
        rng_init = generator(init_seq)
        theta0 = active0 = None
        mean = spec.X @ beta
        for _ in range(max_init_draws):
            eps = sample_errors(model, spec.n, 1, rng_init)[0]
            sol = solve_lasso(spec, mean + eps)
            mask = sol.beta_hat != 0
            if np.array_equal(mask, target):
                theta0 = np.where(mask, sol.beta_hat, sol.subgrad)
                active0 = mask
                break
        if theta0 is None:
            raise NumericalError(
                f"no exact draw hit the conditioning active set in {max_init_draws} tries"
            )
        burn_in = 0
    elif init is not None:
        validate_state(init, spec.p)
        if not np.array_equal(init.active_mask(), target):
            raise ConfigError("initial state must have the conditioning active set")
        theta0, active0 = init.theta(), target
    else:
        theta0 = np.where(target, spec.lam, 0.0)
        active0 = target

    engine = _MhEngine(beta, model, config.tau, track_dets=False)
    engine.set_design(spec)
    engine.set_state(theta0, active0)
    return _run_chain(engine, config, burn_in, generator(moves_seq), conditional=True)


def random_design_mh_sample(
    spec: ProblemSpec,
    beta: np.ndarray,
    model: ErrorModel,
    config: SamplerConfig,
    init: AugmentedState | None = None,
    row_pool: np.ndarray | None = None,
    freeze_design: bool = False,
    max_retries: int = 50,
) -> Chain:
    """MH chain that also refreshes the design by resampling its rows.

    Each iteration first proposes replacing the design with n rows drawn
    with replacement from ``row_pool`` (default: the rows of ``spec.X``),
    accepted by the ratio of augmented densities at the current state (the
    row density cancels); then runs one ordinary MH sweep.  With
    ``freeze_design`` the refresh step is skipped entirely, which
    reproduces :func:`mh_sample` draw-for-draw on the same seed.
    """
    if spec.p > spec.n:
        raise ConfigError("the random-design sampler requires p <= n")
    _validate_config(config, spec.p)
    beta = np.asarray(beta, dtype=float)
    pool = spec.X if row_pool is None else np.asarray(row_pool, dtype=float)
    if pool.ndim != 2 or pool.shape[1] != spec.p:
        raise DataError(f"row pool must have shape (m, {spec.p})")

    init_seq, moves_seq, design_seq = seed_sequence(config.seed).spawn(3)
    theta0, active0, burn_in = _initial_state(spec, beta, model, config, init, init_seq)
    engine = _MhEngine(beta, model, config.tau)
    engine.set_design(spec)
    engine.set_state(theta0, active0)

    design_step = None
    if not freeze_design:
        rng_design = generator(design_seq)

        def design_step(eng: _MhEngine) -> None:
            eng.attempts[DESIGN_UPDATE] += 1
            candidate = None
            for _ in range(max_retries):
                rows = rng_design.integers(0, pool.shape[0], size=spec.n)
                X_new = pool[rows]
                gram = X_new.T @ X_new / spec.n
                gram = (gram + gram.T) / 2.0
                trial = ProblemSpec(
                    X=X_new,
                    weights=spec.weights,
                    lam=spec.lam,
                    gram=gram,
                    rank_deficient=False,
                )
                try:
                    trial.gram_cholesky
                except NumericalError:
                    continue
                candidate = trial
                break
            if candidate is None:
                raise NumericalError(
                    f"row resampling produced no full-rank design in {max_retries} tries"
                )
            current = eng.log_posterior()
            probe = _MhEngine(eng.beta, eng.model, eng.tau)
            probe.set_design(candidate)
            probe.set_state(eng.theta, eng.active)
            if math.log(rng_design.random()) <= probe.log_posterior() - current:
                eng.set_design(candidate)
                eng.accepts[DESIGN_UPDATE] += 1

    return _run_chain(
        engine,
        config,
        burn_in,
        generator(moves_seq),
        conditional=False,
        design_step=design_step,
    )


def active_bitmask(mask: np.ndarray) -> str:
    """Lowercase hex encoding of the active set (bit j set when j active)."""
    value = 0
    for j in np.nonzero(mask)[0]:
        value |= 1 << int(j)
    return format(value, "x")


def mask_from_bitmask(text: str, p: int) -> np.ndarray:
    value = int(text, 16)
    return np.array([(value >> j) & 1 == 1 for j in range(p)], dtype=bool)


def write_chain_csv(chain: Chain, path: str | Path) -> None:
    """Headerless CSV: iteration, active-set hex bitmask, p theta columns."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i in range(len(chain)):
            cells = [str(int(chain.iterations[i])), active_bitmask(chain.active[i])]
            cells.extend(format(v, ".17g") for v in chain.thetas[i])
            fh.write(",".join(cells) + "\n")


def read_chain_csv(path: str | Path) -> Chain:
    iterations: list[int] = []
    masks: list[np.ndarray] = []
    rows: list[np.ndarray] = []
    p = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if p is None:
                p = len(cells) - 2
            elif len(cells) - 2 != p:
                raise DataError("inconsistent column count in chain CSV")
            iterations.append(int(cells[0]))
            masks.append(mask_from_bitmask(cells[1], p))
            rows.append(np.array([float(c) for c in cells[2:]]))
    if not rows:
        raise DataError("chain CSV is empty")
    return Chain(
        thetas=np.vstack(rows),
        active=np.vstack(masks),
        iterations=np.asarray(iterations, dtype=int),
    )


def write_chain_meta(
    chain: Chain, path: str | Path, config_echo: dict | None = None
) -> None:
    """JSON sidecar: acceptance tallies and a config echo."""
    meta = {
        "accept_counts": {k: int(v) for k, v in chain.accept_counts.items()},
        "proposal_counts": {k: int(v) for k, v in chain.proposal_counts.items()},
        "n_states": len(chain),
        "p": chain.p,
        "seed": chain.seed,
        "config": config_echo or {},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
