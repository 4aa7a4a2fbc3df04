"""Command-line surface: estimation, simulation, benchmarks, and the two applications.

Exit codes: 0 on success, 2 on input problems (bad files, flags, shapes),
3 on numerical failures (non-PD inputs, solver breakdowns).
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace

import click
import numpy as np

from . import __version__
from .benchmark import (
    SCHEMA_VERSION,
    eigen_trajectories,
    run_benchmark,
    write_benchmark_csv,
    write_benchmark_json,
    write_trajectories_csv,
)
from .errors import InputError, NotPositiveDefinite, NumericalError
from .estimators import GAMMA_METHODS, EstimatorConfig, estimate_from_config
from .lda import lda_experiment
from .linalg import load_csv, load_sym_csv, sample_covariance, save_matrix_csv
from .models import ModelSpec, generate_model, sample_mvn
from .portfolio import BacktestConfig, backtest
from .benchmark import HARNESS_GRID_FLOOR
from .tuning import GRID_COUNT, GRID_FLOOR_RATIO, bic_select, cross_validate

_METHOD_CHOICES = ("eagl", "glasso", "gen", "tgen", "gridge", "tgridge", "ledoit-wolf", "naive")


def _method_key(name: str) -> str:
    return name.replace("-", "_")


def _write_json(path, payload) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if path is None:
        click.echo(text, nl=False)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _parse_gamma_grid(spec: str) -> np.ndarray:
    """Parse ``start:stop:step`` into an inclusive grid."""
    try:
        start, stop, step = (float(v) for v in spec.split(":"))
    except ValueError as exc:
        raise InputError(f"bad gamma grid {spec!r}; expected start:stop:step") from exc
    if step <= 0 or stop < start or start <= 0:
        raise InputError(f"bad gamma grid {spec!r}; need 0 < start <= stop and step > 0")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


@click.group()
@click.version_option(__version__)
def cli():
    """Sparse precision-matrix estimation with entropy adjustment."""


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--header", is_flag=True, help="Skip one header line in the input CSV.")
@click.option("--input-kind", type=click.Choice(["data", "covariance"]), default="data",
              show_default=True, help="Whether the CSV holds data rows or a covariance matrix.")
@click.option("--method", type=click.Choice(_METHOD_CHOICES), default="eagl", show_default=True)
@click.option("--gamma", type=float, default=None, help="Fixed penalty value.")
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--tune", type=click.Choice(["cv", "bic"]), default=None,
              help="Select the penalty on a grid instead of fixing it.")
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--grid-count", type=int, default=GRID_COUNT, show_default=True)
@click.option("--grid-floor", type=float, default=GRID_FLOOR_RATIO, show_default=True,
              help="Grid lower bound as a fraction of gamma_max.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--penalize-diagonal/--no-penalize-diagonal", default=True, show_default=True)
@click.option("--bic-count-diagonal", is_flag=True, help="Count diagonal entries in BIC df.")
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--max-iter", type=int, default=1000, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the JSON report here instead of stdout.")
@click.option("--out-matrix", type=click.Path(dir_okay=False), default=None,
              help="Also write the estimated matrix as CSV.")
def estimate(input_path, header, input_kind, method, gamma, alpha, tune, folds, grid_count,
             grid_floor, seed, penalize_diagonal, bic_count_diagonal, tol, max_iter, out,
             out_matrix):
    """Estimate a precision matrix from a CSV file."""
    method = _method_key(method)
    template = EstimatorConfig(
        method=method, gamma=gamma if gamma is not None else 0.0, alpha=alpha,
        tol=tol, max_iter=max_iter, penalize_diagonal=penalize_diagonal,
    )
    needs_gamma = method in GAMMA_METHODS
    if needs_gamma and (gamma is None) == (tune is None):
        raise InputError(f"method {method} needs exactly one of --gamma or --tune")
    if not needs_gamma and (gamma is not None or tune is not None):
        raise InputError(f"method {method} takes no penalty")

    data = cov = None
    if input_kind == "data":
        data = load_csv(input_path, header=header)
        cov = sample_covariance(data)
    else:
        cov = load_sym_csv(input_path, header=header)
        if tune is not None or method == "ledoit_wolf":
            raise InputError("tuning and ledoit-wolf need data rows, not a covariance matrix")

    tuning_payload = None
    if tune is not None:
        if tune == "cv":
            tuned = cross_validate(data, template, k=folds, seed=seed,
                                   grid_count=grid_count, grid_floor=grid_floor)
        else:
            tuned = bic_select(data, template, grid_count=grid_count, grid_floor=grid_floor,
                               count_diagonal=bic_count_diagonal)
        template = replace(template, gamma=tuned.best_gamma)
        tuning_payload = tuned.to_json_dict()

    est = estimate_from_config(template, cov=cov, data=data)
    report = est.report
    payload = {
        "schema_version": SCHEMA_VERSION,
        "method": method,
        "p": int(np.asarray(est.omega).shape[0]),
        "gamma": template.gamma if needs_gamma else None,
        "alpha": alpha if method in ("eagl", "gen", "tgen") else None,
        "penalize_diagonal": penalize_diagonal if method in ("eagl", "glasso") else None,
        "objective": est.objective,
        "converged": report.converged if report else True,
        "iterations": report.iterations if report else 0,
        "kkt_residual": report.kkt_residual if report else None,
        "shrinkage": est.shrinkage,
        "tuning": tuning_payload,
        "omega": [[float(v) for v in row] for row in np.asarray(est.omega)],
    }
    _write_json(out, payload)
    if out_matrix is not None:
        save_matrix_csv(out_matrix, est.omega)


@cli.command()
@click.option("--model", type=click.IntRange(1, 7), required=True)
@click.option("--p", type=int, required=True)
@click.option("--n", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
def simulate(model, p, n, seed, out_dir):
    """Generate a true precision matrix and Gaussian samples from it."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.default_rng(seed)
    seeds = rng.integers(2**63, size=2)
    truth = generate_model(ModelSpec(model_id=model, p=p, seed=int(seeds[0])))
    x = sample_mvn(truth, n, int(seeds[1]))
    omega_path = os.path.join(out_dir, "omega.csv")
    samples_path = os.path.join(out_dir, "samples.csv")
    save_matrix_csv(omega_path, truth.omega)
    save_matrix_csv(samples_path, x)
    _write_json(
        os.path.join(out_dir, "manifest.json"),
        {
            "schema_version": SCHEMA_VERSION,
            "model_id": model,
            "p": p,
            "n": n,
            "seed": seed,
            "edge_count": truth.edge_count,
            "files": {"omega": "omega.csv", "samples": "samples.csv"},
        },
    )


@cli.command()
@click.option("--models", default="1", show_default=True,
              help="Comma-separated model ids, e.g. 1,2,3.")
@click.option("--p", type=int, default=100, show_default=True)
@click.option("--n", type=int, default=100, show_default=True)
@click.option("--reps", type=int, default=20, show_default=True)
@click.option("--estimators", default="eagl,glasso", show_default=True,
              help="Comma-separated estimator names.")
@click.option("--criterion", type=click.Choice(["cv", "bic"]), default="cv", show_default=True)
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--grid-count", type=int, default=GRID_COUNT, show_default=True)
@click.option("--grid-floor", type=float, default=HARNESS_GRID_FLOOR, show_default=True,
              help="Grid lower bound as a fraction of gamma_max.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Summary CSV path; a .json twin with per-replication values sits next to it.")
def benchmark(models, p, n, reps, estimators, criterion, alpha, folds, grid_count, grid_floor,
              seed, out):
    """Replicate generate/tune/estimate/score over models and estimators."""
    try:
        model_ids = [int(v) for v in models.split(",") if v]
    except ValueError as exc:
        raise InputError(f"bad --models value {models!r}") from exc
    templates = {}
    for raw in (v.strip() for v in estimators.split(",") if v.strip()):
        key = _method_key(raw)
        templates[key] = EstimatorConfig(method=key, alpha=alpha)
    if not templates:
        raise InputError("no estimators given")
    result = run_benchmark(
        model_ids, p, n, templates, criterion=criterion,
        replications=reps, seed=seed, k=folds, grid_count=grid_count, grid_floor=grid_floor,
    )
    write_benchmark_csv(out, result)
    json_path = out[:-4] + ".json" if out.endswith(".csv") else out + ".json"
    write_benchmark_json(json_path, result)


@cli.command("eigen-trajectories")
@click.option("--p", type=int, default=50, show_default=True)
@click.option("--n", type=int, default=100, show_default=True)
@click.option("--gamma-grid", default="0.1:2:0.1", show_default=True,
              help="Inclusive start:stop:step penalty grid.")
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--model", type=click.IntRange(1, 7), default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def eigen_trajectories_cmd(p, n, gamma_grid, alpha, model, seed, out):
    """Eigenvalues of the L1 and entropy-adjusted fits along a penalty grid."""
    gammas = _parse_gamma_grid(gamma_grid)
    rows = eigen_trajectories(p=p, n=n, gammas=gammas, seed=seed, alpha=alpha, model_id=model)
    write_trajectories_csv(out, rows)


@cli.command()
@click.option("--group1", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--group2", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--header", is_flag=True)
@click.option("--genes", type=int, default=100, show_default=True,
              help="Features kept after the two-sample t screen.")
@click.option("--reps", type=int, default=100, show_default=True)
@click.option("--estimator", type=click.Choice(_METHOD_CHOICES), default="eagl", show_default=True)
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--train1", type=int, default=None,
              help="Training rows from group 1 (default: about 60 percent).")
@click.option("--train2", type=int, default=None)
@click.option("--criterion", type=click.Choice(["cv", "bic"]), default="cv", show_default=True)
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--grid-count", type=int, default=GRID_COUNT, show_default=True)
@click.option("--grid-floor", type=float, default=HARNESS_GRID_FLOOR, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def classify(group1, group2, header, genes, reps, estimator, alpha, train1, train2,
             criterion, folds, grid_count, grid_floor, seed, out):
    """Repeated linear discriminant classification of two groups."""
    x1 = load_csv(group1, header=header)
    x2 = load_csv(group2, header=header)
    if train1 is None:
        train1 = max(1, int(round(0.6 * x1.shape[0])))
    if train2 is None:
        train2 = max(1, int(round(0.6 * x2.shape[0])))
    template = EstimatorConfig(method=_method_key(estimator), alpha=alpha)
    report = lda_experiment(
        x1, x2, train1, train2, genes, template,
        replications=reps, seed=seed, criterion=criterion, k=folds,
        grid_count=grid_count, grid_floor=grid_floor,
    )
    _write_json(
        out,
        {
            "schema_version": SCHEMA_VERSION,
            "estimator": _method_key(estimator),
            "genes": genes,
            "replications": report.replications,
            "train_sizes": [train1, train2],
            "misclassification": report.misclassification,
            "umcc": report.umcc,
            "ba": report.ba,
            "skipped_features": report.skipped_features,
        },
    )


@cli.command("backtest")
@click.option("--returns", "returns_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--header", is_flag=True)
@click.option("--window", type=int, default=150, show_default=True)
@click.option("--estimator", type=click.Choice(_METHOD_CHOICES), default="eagl", show_default=True)
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--criterion", type=click.Choice(["cv", "bic", "none"]), default="cv",
              show_default=True)
@click.option("--gamma", type=float, default=None, help="Fixed penalty when --criterion none.")
@click.option("--retune-every", type=int, default=1, show_default=True)
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--grid-count", type=int, default=GRID_COUNT, show_default=True)
@click.option("--grid-floor", type=float, default=HARNESS_GRID_FLOOR, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def backtest_cmd(returns_path, header, window, estimator, alpha, criterion, gamma,
                 retune_every, folds, grid_count, grid_floor, seed, out):
    """Rolling minimum-variance backtest on a returns CSV."""
    returns = load_csv(returns_path, header=header)
    template = EstimatorConfig(
        method=_method_key(estimator), alpha=alpha,
        gamma=gamma if gamma is not None else 0.0,
    )
    config = BacktestConfig(
        returns=returns, window=window, template=template,
        criterion=None if criterion == "none" else criterion,
        retune_every=retune_every, seed=seed, k=folds,
        grid_count=grid_count, grid_floor=grid_floor,
    )
    report = backtest(config)
    payload = {"schema_version": SCHEMA_VERSION, "estimator": _method_key(estimator),
               "window": window, **report.to_json_dict()}
    _write_json(out, payload)


def main(argv=None) -> None:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        sys.exit(2)
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        sys.exit(2)
    except (InputError, OSError) as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(2)
    except (NotPositiveDefinite, NumericalError, np.linalg.LinAlgError) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(3)
    sys.exit(0)
