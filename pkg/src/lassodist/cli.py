"""Command-line front end: CSV/JSON plumbing around the library.

Subcommands cover dataset generation, joint and conditional sampler runs,
importance-sampled tail probabilities (single and multi-target), chain
diagnostics, and the posterior decision check.  Every run writes a
``manifest.json`` echoing the resolved configuration, so outputs are
reproducible from the manifest alone.  No numerics live here.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .density import Gaussian, StudentT
from .errors import ConfigError, DataError, LassodistError
from .estimation import (
    acceptance_band_report,
    chain_diagnostics,
    coefficient_histogram,
    estimate_sigma2,
    fit_elliptical_model,
    posterior_decision_sample,
    summarize_chain,
    threshold_estimator,
)
from .importance import (
    coefficient_statistic,
    multi_pvalue_study,
    pool_results,
    pvalue_study,
)
from .problem import build_problem, synthetic_dataset
from .rng import seed_sequence
from .samplers import (
    conditional_mh_sample,
    default_sampler_config,
    direct_sample,
    mh_sample,
    read_chain_csv,
    write_chain_csv,
    write_chain_meta,
)
from .solver import lambda_grid, lambda_max, solve_lasso

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """Argparse that reports usage problems through the package errors."""

    def error(self, message: str):
        raise ConfigError(message)


def _load_matrix(path: str) -> np.ndarray:
    try:
        arr = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read matrix from {path}: {exc}") from exc
    return arr


def _load_vector(path: str) -> np.ndarray:
    try:
        arr = np.loadtxt(path, delimiter=",", dtype=float)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read vector from {path}: {exc}") from exc
    return np.atleast_1d(arr)


def _save_array(path: Path, arr: np.ndarray) -> None:
    np.savetxt(path, arr, fmt="%.17g", delimiter=",")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(out_dir: Path, args: argparse.Namespace, outputs: list[str]) -> None:
    config = {
        k: v for k, v in vars(args).items() if k not in ("func", "command") and not k.startswith("_")
    }
    _write_json(
        out_dir / "manifest.json",
        {
            "command": args.command,
            "config": config,
            "outputs": sorted(outputs + ["manifest.json"]),
            "version": __version__,
        },
    )


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _resolve_lambda(args: argparse.Namespace, X: np.ndarray, weights, y: np.ndarray):
    """Penalty from --lambda, or --lambda-frac relative to the zero point."""
    if args.lam is not None:
        if args.lam <= 0:
            raise ConfigError("penalty must be positive")
        return float(args.lam)
    if getattr(args, "lambda_frac", None) is not None:
        if not 0 < args.lambda_frac:
            raise ConfigError("lambda fraction must be positive")
        probe = build_problem(X, weights, 1.0)
        return float(args.lambda_frac * lambda_max(probe, y))
    return None


def _resolve_center(args: argparse.Namespace, spec, y: np.ndarray) -> np.ndarray:
    """Coefficient vector the sampled law is centered at."""
    if getattr(args, "beta", None) is not None:
        beta = _load_vector(args.beta)
        if beta.shape != (spec.p,):
            raise DataError(f"beta file must hold {spec.p} values, got {beta.shape[0]}")
        return beta
    fit = solve_lasso(spec, y)
    if getattr(args, "b_th", None) is not None:
        return threshold_estimator(fit.beta_hat, args.b_th)
    return fit.beta_hat


def _resolve_sigma2(args: argparse.Namespace, spec, y: np.ndarray, center: np.ndarray) -> float:
    if args.sigma2 is not None:
        if args.sigma2 <= 0:
            raise ConfigError("noise variance must be positive")
        return float(args.sigma2)
    if getattr(args, "estimate_sigma2", False):
        return estimate_sigma2(spec, y, center)
    raise ConfigError("provide --sigma2 or --estimate-sigma2")


def _resolve_model(args: argparse.Namespace, spec, y, center, sigma2, seed_seq):
    name = args.model
    if name == "gaussian":
        return Gaussian(sigma2)
    if name == "studentt":
        if args.dof is None:
            raise ConfigError("--dof is required with the studentt model")
        return StudentT(dof=float(args.dof), scale=sigma2)
    if name == "elliptical":
        return fit_elliptical_model(
            spec, y, center, n_samples=args.boot_samples, bins=args.bins, seed=seed_seq
        )
    raise ConfigError(f"unknown error model {name!r}")


def _add_data_args(p: _Parser) -> None:
    p.add_argument("--x", required=True, help="design matrix CSV (n rows, p columns)")
    p.add_argument("--y", required=True, help="response CSV (n values)")
    p.add_argument("--weights", default=None, help="penalty weight CSV (p values, default all 1)")
    lam = p.add_mutually_exclusive_group()
    lam.add_argument("--lambda", dest="lam", type=float, default=None, help="penalty level")
    lam.add_argument(
        "--lambda-frac",
        type=float,
        default=None,
        help="penalty as a fraction of the smallest all-zero penalty",
    )


def _add_model_args(p: _Parser, elliptical: bool = True) -> None:
    choices = ["gaussian", "studentt"] + (["elliptical"] if elliptical else [])
    p.add_argument("--model", choices=choices, default="gaussian")
    p.add_argument("--dof", type=float, default=None, help="degrees of freedom (studentt)")
    p.add_argument("--sigma2", type=float, default=None, help="noise variance")
    p.add_argument(
        "--estimate-sigma2",
        action="store_true",
        help="estimate the noise variance from residuals (needs p < n)",
    )
    if elliptical:
        p.add_argument("--boot-samples", type=int, default=1000, help="bootstrap size (elliptical)")
        p.add_argument("--bins", type=int, default=30, help="radial histogram bins (elliptical)")


def _add_sampler_args(p: _Parser) -> None:
    p.add_argument("--beta", default=None, help="CSV with the centering coefficients")
    p.add_argument(
        "--b-th",
        type=float,
        default=None,
        help="threshold the fit to get the centering coefficients",
    )
    p.add_argument("--iters", type=int, default=5500, help="total sweeps")
    p.add_argument("--burnin", type=int, default=500, help="sweeps discarded from the front")
    p.add_argument("--K", type=int, default=None, help="membership proposals per sweep")
    p.add_argument(
        "--equilibrium-init",
        action="store_true",
        help="start from one exact draw and keep every sweep",
    )


def _cmd_gen_data(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    X, y, beta0 = synthetic_dataset(
        n=args.n,
        p=args.p,
        rho=args.rho,
        sigma2=args.sigma2,
        signal=args.signal,
        amplitude=args.amplitude,
        seed=args.seed,
    )
    _save_array(out / "X.csv", X)
    _save_array(out / "y.csv", y)
    _save_array(out / "beta0.csv", beta0)
    _write_manifest(out, args, ["X.csv", "y.csv", "beta0.csv"])
    print(f"wrote X.csv ({args.n}x{args.p}), y.csv, beta0.csv to {out}")
    return 0


def _cmd_sample_joint(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    X = _load_matrix(args.x)
    y = _load_vector(args.y)
    weights = _load_vector(args.weights) if args.weights else 1.0
    lam = _resolve_lambda(args, X, weights, y)

    outputs = []
    if args.lambda_grid is not None:
        probe = build_problem(X, weights, 1.0)
        grid = lambda_grid(probe, y, num=args.lambda_grid, min_frac=args.lambda_min_frac)
        _save_array(out / "lambda_grid.csv", grid)
        outputs.append("lambda_grid.csv")
        if lam is None:
            _write_manifest(out, args, outputs)
            print(f"wrote lambda_grid.csv ({args.lambda_grid} values) to {out}")
            return 0
    if lam is None:
        raise ConfigError("provide --lambda or --lambda-frac (or just --lambda-grid)")

    spec = build_problem(X, weights, lam)
    center = _resolve_center(args, spec, y)
    sigma2 = _resolve_sigma2(args, spec, y, center)
    fit_seq, run_seq = seed_sequence(args.seed).spawn(2)
    model = _resolve_model(args, spec, y, center, sigma2, fit_seq)

    if args.method == "direct":
        chain = direct_sample(spec, center, model, args.iters, run_seq)
    else:
        config = default_sampler_config(
            spec,
            run_seq,
            iters=args.iters,
            burn_in=args.burnin,
            beta_ref=center,
            sigma2_hat=sigma2,
            K=args.K,
            equilibrium_init=args.equilibrium_init,
        )
        chain = mh_sample(spec, center, model, config)
    write_chain_csv(chain, out / "chain.csv")
    write_chain_meta(
        chain,
        out / "chain_meta.json",
        config_echo={
            "method": args.method,
            "iters": args.iters,
            "burnin": args.burnin,
            "lambda": lam,
            "sigma2": sigma2,
            "model": args.model,
            "seed": args.seed,
        },
    )
    outputs += ["chain.csv", "chain_meta.json"]
    _write_manifest(out, args, outputs)
    print(f"wrote chain.csv ({len(chain)} states) and chain_meta.json to {out}")
    return 0


def _cmd_sample_cond(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    X = _load_matrix(args.x)
    y = _load_vector(args.y)
    weights = _load_vector(args.weights) if args.weights else 1.0
    lam = _resolve_lambda(args, X, weights, y)
    if lam is None:
        raise ConfigError("provide --lambda or --lambda-frac")
    spec = build_problem(X, weights, lam)

    if args.active.strip():
        try:
            active = np.array(sorted({int(tok) for tok in args.active.split(",")}))
        except ValueError as exc:
            raise ConfigError(f"cannot parse --active {args.active!r}") from exc
    else:
        active = np.array([], dtype=int)
    if active.size and (active.min() < 0 or active.max() >= spec.p):
        raise ConfigError(f"--active indices must lie in [0, {spec.p})")

    center = _resolve_center(args, spec, y)
    sigma2 = _resolve_sigma2(args, spec, y, center)
    fit_seq, run_seq = seed_sequence(args.seed).spawn(2)
    model = _resolve_model(args, spec, y, center, sigma2, fit_seq)
    config = default_sampler_config(
        spec,
        run_seq,
        iters=args.iters,
        burn_in=args.burnin,
        beta_ref=center,
        sigma2_hat=sigma2,
        K=args.K,
        equilibrium_init=args.equilibrium_init,
    )
    chain = conditional_mh_sample(spec, center, model, active, config)
    write_chain_csv(chain, out / "chain.csv")
    write_chain_meta(
        chain,
        out / "chain_meta.json",
        config_echo={
            "active": active.tolist(),
            "iters": args.iters,
            "burnin": args.burnin,
            "lambda": lam,
            "sigma2": sigma2,
            "model": args.model,
            "seed": args.seed,
        },
    )
    _write_manifest(out, args, ["chain.csv", "chain_meta.json"])
    print(f"wrote chain.csv ({len(chain)} states) and chain_meta.json to {out}")
    return 0


def _null_beta(args: argparse.Namespace, p: int) -> np.ndarray:
    if args.null_beta == "zero":
        return np.zeros(p)
    beta0 = _load_vector(args.null_beta)
    if beta0.shape != (p,):
        raise DataError(f"null beta file must hold {p} values, got {beta0.shape[0]}")
    return beta0


def _pvalue_payload(res, args: argparse.Namespace, extra: dict | None = None) -> dict:
    payload = {
        "estimate": res.estimate,
        "log10_estimate": float(np.log10(res.estimate)) if res.estimate > 0 else None,
        "ess": res.ess,
        "cv": None if res.cv is None or not np.isfinite(res.cv) else res.cv,
        "degenerate": bool(res.degenerate),
        "lambda_star": res.lambda_star,
        "t_star": args.t_star if hasattr(args, "t_star") else None,
        "statistic": args.stat,
        "L": args.L,
        "trial": {
            "sigma2_dagger": res.trial.sigma2_dagger,
            "lambda_dagger": res.trial.lambda_dagger,
        }
        if res.trial is not None
        else None,
    }
    if args.stat == "abs-coord":
        payload["coord"] = args.coord
    payload.update(extra or {})
    return payload


def _pvalue_worker(payload: dict):
    spec = build_problem(payload["X"], payload["weights"], payload["lam"])
    statistic = coefficient_statistic(payload["stat"], payload["coord"])
    return pvalue_study(
        spec,
        payload["beta0"],
        payload["sigma2"],
        payload["lambda_star"],
        statistic,
        payload["t_star"],
        payload["L"],
        payload["seed"],
        m_dagger=payload["m_dagger"],
        l_pilot=payload["l_pilot"],
        replicates=1,
    )


def _cmd_pvalue(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    X = _load_matrix(args.x)
    weights = _load_vector(args.weights) if args.weights else 1.0
    spec = build_problem(X, weights, args.lambda_star)
    beta0 = _null_beta(args, spec.p)
    statistic = coefficient_statistic(args.stat, args.coord)

    if args.replicates > 1 and args.workers > 1:
        seeds = seed_sequence(args.seed).spawn(args.replicates)
        payloads = [
            {
                "X": X,
                "weights": spec.weights,
                "lam": args.lambda_star,
                "stat": args.stat,
                "coord": args.coord,
                "beta0": beta0,
                "sigma2": args.sigma2,
                "lambda_star": args.lambda_star,
                "t_star": args.t_star,
                "L": args.L,
                "seed": s,
                "m_dagger": args.m_dagger,
                "l_pilot": args.l_pilot,
            }
            for s in seeds
        ]
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            runs = list(pool.map(_pvalue_worker, payloads))
        res = pool_results(runs, args.lambda_star)
    else:
        res = pvalue_study(
            spec,
            beta0,
            args.sigma2,
            args.lambda_star,
            statistic,
            args.t_star,
            args.L,
            args.seed,
            m_dagger=args.m_dagger,
            l_pilot=args.l_pilot,
            replicates=args.replicates,
        )
    payload = _pvalue_payload(res, args, {"replicates": args.replicates})
    _write_json(out / "pvalue.json", payload)
    _write_manifest(out, args, ["pvalue.json"])
    print(f"estimate {res.estimate:.6g} (ess {res.ess:.1f}); wrote pvalue.json to {out}")
    return 0


def _cmd_pvalue_multi(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    X = _load_matrix(args.x)
    weights = _load_vector(args.weights) if args.weights else 1.0
    try:
        lambda_stars = np.array([float(tok) for tok in args.lambda_stars.split(",")])
        t_stars = np.array([float(tok) for tok in args.t_stars.split(",")])
    except ValueError as exc:
        raise ConfigError("cannot parse --lambda-stars / --t-stars") from exc
    if lambda_stars.size != t_stars.size:
        raise ConfigError("--lambda-stars and --t-stars need matching lengths")
    spec = build_problem(X, weights, float(lambda_stars[0]))
    beta0 = _null_beta(args, spec.p)
    statistic = coefficient_statistic(args.stat, args.coord)
    results = multi_pvalue_study(
        spec,
        beta0,
        args.sigma2,
        lambda_stars,
        statistic,
        t_stars,
        args.L,
        args.seed,
        m_dagger=args.m_dagger,
        l_pilot=args.l_pilot,
    )
    payload = {
        "targets": [
            {
                "estimate": r.estimate,
                "log10_estimate": float(np.log10(r.estimate)) if r.estimate > 0 else None,
                "ess": r.ess,
                "degenerate": bool(r.degenerate),
                "lambda_star": r.lambda_star,
                "t_star": float(t),
            }
            for r, t in zip(results, t_stars)
        ],
        "statistic": args.stat,
        "L": args.L,
        "trial": {
            "sigma2_dagger": results[0].trial.sigma2_dagger,
            "lambda_dagger": results[0].trial.lambda_dagger,
        },
    }
    if args.stat == "abs-coord":
        payload["coord"] = args.coord
    _write_json(out / "pvalue_multi.json", payload)
    _write_manifest(out, args, ["pvalue_multi.json"])
    print(f"wrote pvalue_multi.json ({lambda_stars.size} targets) to {out}")
    return 0


def _cmd_diagnose(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    chain = read_chain_csv(args.chain)
    if args.meta:
        try:
            with open(args.meta, encoding="utf-8") as fh:
                meta = json.load(fh)
        except (OSError, ValueError) as exc:
            raise DataError(f"cannot read meta JSON {args.meta}: {exc}") from exc
        chain.accept_counts = {k: int(v) for k, v in meta.get("accept_counts", {}).items()}
        chain.proposal_counts = {
            k: int(v) for k, v in meta.get("proposal_counts", {}).items()
        }

    statistic = coefficient_statistic(args.g, args.coord)
    report = chain_diagnostics(chain, statistic, cost_ratio=args.cost_ratio)
    notes = acceptance_band_report(chain) if args.meta else []
    _write_json(
        out / "diagnostics.json",
        {
            "psi": report.psi,
            "ess": report.ess,
            "gamma": report.gamma,
            "truncation_lag": report.truncation_lag,
            "n": report.n,
            "acf_head": [float(v) for v in report.acf[: min(11, report.acf.size)]],
            "statistic": args.g,
            "cost_ratio": args.cost_ratio,
            "acceptance_notes": notes,
        },
    )
    stats = summarize_chain(chain)
    _write_json(
        out / "summary.json",
        {
            "select_prob": stats.select_prob.tolist(),
            "quantile_lo": stats.quantile_lo.tolist(),
            "quantile_hi": stats.quantile_hi.tolist(),
            "cond_mean": [None if np.isnan(v) else float(v) for v in stats.cond_mean],
            "cond_sd": [None if np.isnan(v) else float(v) for v in stats.cond_sd],
            "model_freq": stats.model_freq,
        },
    )
    outputs = ["diagnostics.json", "summary.json"]
    if args.hist_coord is not None:
        centers, masses = coefficient_histogram(chain, args.hist_coord, args.hist_bins)
        _save_array(out / "histogram.csv", np.column_stack([centers, masses]))
        outputs.append("histogram.csv")
    _write_manifest(out, args, outputs)
    print(
        f"psi {report.psi:.3f}, ess {report.ess:.1f}, gamma {report.gamma:.4f}; "
        f"wrote {', '.join(outputs)} to {out}"
    )
    return 0


def _cmd_posterior_check(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    X = _load_matrix(args.x)
    y = _load_vector(args.y)
    weights = _load_vector(args.weights) if args.weights else 1.0
    lam = _resolve_lambda(args, X, weights, y)
    if lam is None:
        raise ConfigError("provide --lambda or --lambda-frac")
    spec = build_problem(X, weights, lam)

    ols = spec.gram_solve(X.T @ y / spec.n)
    sigma2 = _resolve_sigma2(args, spec, y, ols)
    if args.model == "studentt":
        if args.dof is None:
            raise ConfigError("--dof is required with the studentt model")
        model = StudentT(dof=float(args.dof), scale=sigma2)
    else:
        model = Gaussian(sigma2)
    chain = posterior_decision_sample(
        spec, y, model, args.L, args.seed, lam=args.decision_lambda
    )
    write_chain_csv(chain, out / "chain.csv")
    write_chain_meta(
        chain,
        out / "chain_meta.json",
        config_echo={
            "L": args.L,
            "lambda": lam,
            "decision_lambda": args.decision_lambda,
            "sigma2": sigma2,
            "model": args.model,
            "seed": args.seed,
        },
    )
    _write_manifest(out, args, ["chain.csv", "chain_meta.json"])
    print(f"wrote chain.csv ({len(chain)} draws) and chain_meta.json to {out}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="lassodist",
        description="Sampling-distribution toolkit for penalized regression estimates",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-data", help="generate an equicorrelated synthetic dataset")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--rho", type=float, default=0.25)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--signal", type=int, default=None, help="number of nonzero coefficients")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("sample-joint", help="sample the joint law of the augmented estimator")
    _add_data_args(p)
    p.add_argument("--method", choices=["mls", "direct"], default="mls")
    _add_model_args(p)
    _add_sampler_args(p)
    p.add_argument("--lambda-grid", type=int, default=None, help="also write a penalty grid CSV")
    p.add_argument("--lambda-min-frac", type=float, default=0.01)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_sample_joint)

    p = sub.add_parser("sample-cond", help="sample conditionally on a fixed active set")
    _add_data_args(p)
    p.add_argument("--active", required=True, help="comma-separated 0-based active indices")
    _add_model_args(p)
    _add_sampler_args(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_sample_cond)

    p = sub.add_parser("pvalue", help="importance-sampled tail probability")
    p.add_argument("--x", required=True)
    p.add_argument("--weights", default=None)
    p.add_argument("--null-beta", default="zero", help='"zero" or a CSV path')
    p.add_argument("--sigma2", type=float, required=True)
    p.add_argument("--lambda-star", type=float, required=True)
    p.add_argument("--stat", choices=["l1", "linf", "abs-coord"], default="l1")
    p.add_argument("--coord", type=int, default=None)
    p.add_argument("--t-star", type=float, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--m-dagger", type=float, default=5.0)
    p.add_argument("--l-pilot", type=int, default=100)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_pvalue)

    p = sub.add_parser("pvalue-multi", help="several tail targets sharing one trial sample")
    p.add_argument("--x", required=True)
    p.add_argument("--weights", default=None)
    p.add_argument("--null-beta", default="zero")
    p.add_argument("--sigma2", type=float, required=True)
    p.add_argument("--lambda-stars", required=True, help="comma-separated target penalties")
    p.add_argument("--t-stars", required=True, help="comma-separated thresholds")
    p.add_argument("--stat", choices=["l1", "linf", "abs-coord"], default="l1")
    p.add_argument("--coord", type=int, default=None)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--m-dagger", type=float, default=5.0)
    p.add_argument("--l-pilot", type=int, default=100)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_pvalue_multi)

    p = sub.add_parser("diagnose", help="chain summaries and efficiency diagnostics")
    p.add_argument("--chain", required=True, help="chain CSV from a sampler run")
    p.add_argument("--meta", default=None, help="chain_meta.json for acceptance notes")
    p.add_argument("--g", choices=["l1", "linf", "abs-coord"], default="l1")
    p.add_argument("--coord", type=int, default=None)
    p.add_argument("--cost-ratio", type=float, default=1.0)
    p.add_argument("--hist-coord", type=int, default=None)
    p.add_argument("--hist-bins", type=int, default=50)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_diagnose)

    p = sub.add_parser("posterior-check", help="posterior decision draws for comparison")
    _add_data_args(p)
    _add_model_args(p, elliptical=False)
    p.add_argument("--decision-lambda", type=float, default=None, help="override the decision penalty")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_posterior_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except LassodistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
