"""Penalty selection by K-fold cross-validation or BIC over a log-spaced grid."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError, NotPositiveDefinite, NumericalError
from .estimators import (
    GAMMA_METHODS,
    EstimatorConfig,
    PrecisionEstimate,
    estimate_from_config,
)
from .linalg import centered_second_moment, log_det_pd, sample_covariance
from .metrics import ZERO_TOL

GRID_COUNT = 50
GRID_FLOOR_RATIO = 1e-3
FALLBACK_GRID = (1e-3, 1.0)


@dataclass(frozen=True)
class TuningGrid:
    """Strictly increasing positive penalty values plus how they were built."""

    gammas: np.ndarray
    rule: str = "log"

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=np.float64)
        if g.ndim != 1 or g.size == 0:
            raise InputError("grid must be a nonempty 1-d array")
        if np.any(g <= 0) or np.any(np.diff(g) <= 0):
            raise InputError("grid must be strictly increasing and positive")
        g = g.copy()
        g.flags.writeable = False
        object.__setattr__(self, "gammas", g)

    def __len__(self) -> int:
        return int(self.gammas.size)


@dataclass(frozen=True)
class TuningResult:
    """Selected penalty plus the evaluated grid and per-point scores."""

    best_gamma: float
    criterion: str
    gammas: np.ndarray
    scores: np.ndarray
    fold_scores: np.ndarray | None = None
    seed: int | None = None
    k: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "grid": [float(g) for g in self.gammas],
            "scores": [float(s) for s in self.scores],
            "best_gamma": float(self.best_gamma),
            "seed": self.seed,
            "k": self.k,
        }


def default_grid(cov, count: int = GRID_COUNT, floor_ratio: float = GRID_FLOOR_RATIO) -> TuningGrid:
    """Log-spaced grid from ``floor_ratio * gamma_max`` to ``gamma_max``.

    ``gamma_max`` is the largest off-diagonal magnitude of the covariance:
    the smallest penalty that already drives the L1 solution fully diagonal.
    A covariance with no off-diagonal signal gets a fixed fallback grid.
    Raising ``floor_ratio`` (say to 1e-2) skips the near-saturated low end,
    which is expensive to solve when p is close to n and is not selected by
    either criterion in practice.
    """
    if count < 2:
        raise InputError(f"grid needs at least 2 points, got {count}")
    if not 0.0 < floor_ratio < 1.0:
        raise InputError(f"floor_ratio must lie in (0, 1), got {floor_ratio}")
    s = np.asarray(cov, dtype=np.float64)
    off = s[~np.eye(s.shape[0], dtype=bool)] if s.shape[0] > 1 else np.zeros(0)
    gamma_max = float(np.max(np.abs(off))) if off.size else 0.0
    if gamma_max <= 0.0:
        return TuningGrid(np.geomspace(FALLBACK_GRID[0], FALLBACK_GRID[1], count), rule="fallback")
    return TuningGrid(np.geomspace(floor_ratio * gamma_max, gamma_max, count))


def _coerce_grid(grid, cov, grid_count, grid_floor) -> TuningGrid:
    if grid is None:
        return default_grid(cov, grid_count, grid_floor)
    if isinstance(grid, TuningGrid):
        return grid
    return TuningGrid(np.asarray(grid, dtype=np.float64))


def fit_path(
    cov,
    gammas: np.ndarray,
    template: EstimatorConfig,
    *,
    data=None,
) -> list[PrecisionEstimate | None]:
    """Fit one estimator along a penalty grid, warm-starting downwards.

    The path runs from the largest penalty (near-diagonal solution, cheap)
    to the smallest, reusing each solution to start the next. Results come
    back in the order of ``gammas``; a grid point whose fit failed is
    ``None``.
    """
    if template.method not in GAMMA_METHODS:
        raise InputError(f"method {template.method!r} has no penalty to tune")
    order = np.argsort(gammas)[::-1]
    out: list[PrecisionEstimate | None] = [None] * len(gammas)
    warm = None
    for idx in order:
        config = replace(template, gamma=float(gammas[idx]))
        try:
            est = estimate_from_config(config, cov=cov, data=data, warm_start=warm)
        except (NotPositiveDefinite, NumericalError):
            out[idx] = None
            continue
        out[idx] = est
        if template.method in ("eagl", "glasso"):
            warm = est.report
        elif template.method in ("gen", "tgen"):
            warm = est.omega
    return out


def _predictive_score(estimate: PrecisionEstimate, held_out_cov: np.ndarray) -> float:
    # Negative predictive Gaussian log-likelihood, constants dropped.
    omega = np.asarray(estimate.omega)
    return float(np.sum(omega * held_out_cov)) - log_det_pd(omega)


def _best_index(means: np.ndarray) -> int:
    # Ties break toward the larger penalty (sparser model).
    reversed_best = int(np.argmin(means[::-1]))
    return len(means) - 1 - reversed_best


def cross_validate(
    x,
    template: EstimatorConfig,
    grid=None,
    k: int = 5,
    seed: int = 0,
    grid_count: int = GRID_COUNT,
    grid_floor: float = GRID_FLOOR_RATIO,
) -> TuningResult:
    """Pick the penalty minimizing K-fold held-out negative log-likelihood.

    Rows are shuffled once with the given seed and split into ``k`` folds.
    Each fold's score for a penalty is ``trace(omega_fit S_fold) -
    log det(omega_fit)`` with the fit done on the remaining folds. Fold
    failures score ``+inf``; a penalty is viable only if every fold fit
    succeeded. Ties go to the larger penalty.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise InputError("cross_validate needs an n-by-p data matrix")
    n = x.shape[0]
    if not 2 <= k <= n:
        raise InputError(f"need 2 <= k <= n, got k={k}, n={n}")
    grid = _coerce_grid(grid, sample_covariance(x) if grid is None else None, grid_count, grid_floor)
    rng = np.random.default_rng(seed)
    permutation = rng.permutation(n)
    folds = np.array_split(permutation, k)
    fold_scores = np.full((len(grid), k), np.inf)
    for j, fold in enumerate(folds):
        train = np.setdiff1d(permutation, fold, assume_unique=True)
        s_train = sample_covariance(x[train])
        s_test = centered_second_moment(x[fold])
        path = fit_path(s_train, grid.gammas, template)
        for i, est in enumerate(path):
            if est is not None:
                fold_scores[i, j] = _predictive_score(est, s_test)
    means = fold_scores.mean(axis=1)
    if not np.any(np.isfinite(means)):
        raise NumericalError("every grid point failed on at least one fold")
    best = _best_index(means)
    return TuningResult(
        best_gamma=float(grid.gammas[best]),
        criterion="cv",
        gammas=grid.gammas,
        scores=means,
        fold_scores=fold_scores,
        seed=seed,
        k=k,
    )


def bic_select(
    x,
    template: EstimatorConfig,
    grid=None,
    zero_tol: float = ZERO_TOL,
    count_diagonal: bool = False,
    grid_count: int = GRID_COUNT,
    grid_floor: float = GRID_FLOOR_RATIO,
) -> TuningResult:
    """Pick the penalty minimizing ``n * (trace(S omega) - log det omega) + log(n) * df``.

    Degrees of freedom count the nonzero upper-triangle off-diagonal entries
    of the fit (``count_diagonal`` adds the always-free diagonal back in).
    Ties go to the larger penalty.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise InputError("bic_select needs an n-by-p data matrix with n >= 2")
    n, p = x.shape
    s = sample_covariance(x)
    grid = _coerce_grid(grid, s, grid_count, grid_floor)
    path = fit_path(s, grid.gammas, template)
    scores = np.full(len(grid), np.inf)
    iu = np.triu_indices(p, 1)
    for i, est in enumerate(path):
        if est is None:
            continue
        omega = np.asarray(est.omega)
        df = int(np.sum(np.abs(omega[iu]) > zero_tol))
        if count_diagonal:
            df += p
        scores[i] = n * (float(np.sum(s * omega)) - log_det_pd(omega)) + np.log(n) * df
    if not np.any(np.isfinite(scores)):
        raise NumericalError("every grid point failed")
    best = _best_index(scores)
    return TuningResult(
        best_gamma=float(grid.gammas[best]),
        criterion="bic",
        gammas=grid.gammas,
        scores=scores,
    )
