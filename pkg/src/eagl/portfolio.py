"""Minimum-variance portfolio weights and the rolling out-of-sample backtest."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError, NumericalError
from .estimators import GAMMA_METHODS, EstimatorConfig, estimate_from_config
from .linalg import sample_covariance
from .tuning import GRID_COUNT, GRID_FLOOR_RATIO, bic_select, cross_validate


@dataclass(frozen=True)
class BacktestConfig:
    """Rolling-horizon evaluation setup.

    The estimator refits on each length-``window`` block of past returns;
    when a tuning criterion is set, the penalty is re-tuned every
    ``retune_every`` windows and reused in between.
    """

    returns: np.ndarray
    window: int
    template: EstimatorConfig
    criterion: str | None = "cv"
    retune_every: int = 1
    seed: int = 0
    k: int = 5
    grid_count: int = GRID_COUNT
    grid_floor: float = GRID_FLOOR_RATIO

    def __post_init__(self):
        r = np.asarray(self.returns, dtype=np.float64)
        if r.ndim != 2:
            raise InputError("returns must be an n-by-p matrix")
        if not np.all(np.isfinite(r)):
            raise InputError("returns contain non-finite entries")
        if not 2 <= self.window < r.shape[0]:
            raise InputError(
                f"need 2 <= window < n, got window={self.window}, n={r.shape[0]}"
            )
        if self.criterion not in (None, "cv", "bic"):
            raise InputError(f"unknown criterion {self.criterion!r}")
        if self.retune_every < 1:
            raise InputError("retune_every must be at least 1")
        object.__setattr__(self, "returns", r)


@dataclass(frozen=True)
class BacktestReport:
    """Realized out-of-sample returns and their summary statistics.

    ``risk`` is the sample standard deviation (divisor ``len - 1``), ``None``
    when only one out-of-sample return exists; ``sharpe`` is ``mean / risk``,
    ``None`` whenever the risk is zero or undefined.
    """

    out_of_sample_returns: np.ndarray
    mean: float
    risk: float | None
    sharpe: float | None
    gammas: np.ndarray | None = None

    def to_json_dict(self) -> dict:
        return {
            "mean": self.mean,
            "risk": self.risk,
            "sharpe": self.sharpe,
            "n_windows": int(self.out_of_sample_returns.size),
            "out_of_sample_returns": [float(v) for v in self.out_of_sample_returns],
        }


def mvp_weights(omega) -> np.ndarray:
    """Minimum-variance weights ``omega 1 / (1' omega 1)``; short positions allowed."""
    om = np.asarray(omega, dtype=np.float64)
    if om.ndim != 2 or om.shape[0] != om.shape[1]:
        raise InputError("omega must be square")
    row_sums = om @ np.ones(om.shape[0])
    denom = float(row_sums.sum())
    if denom <= 0.0:
        raise NumericalError("1' omega 1 must be positive; got a nonpositive normalizer")
    return row_sums / denom


def backtest(config: BacktestConfig) -> BacktestReport:
    """Roll a window over the return history, realizing next-period returns.

    For each step the precision matrix is estimated from the trailing window,
    converted to minimum-variance weights, and applied to the next row.
    Summary statistics use divisor ``n - m`` for the mean and ``n - m - 1``
    for the variance.
    """
    r = config.returns
    n = r.shape[0]
    m = config.window
    steps = n - m
    template = config.template
    needs_gamma = template.method in GAMMA_METHODS
    tune_seeds = (
        np.random.default_rng(config.seed).integers(2**63, size=steps)
        if needs_gamma and config.criterion == "cv"
        else None
    )

    oos = np.empty(steps)
    gammas = np.empty(steps) if needs_gamma else None
    current = template
    for step in range(steps):
        window_rows = r[step : step + m]
        if needs_gamma:
            if config.criterion is None:
                if template.gamma <= 0:
                    raise InputError("fixed-penalty backtest needs gamma > 0 in the template")
            elif step % config.retune_every == 0:
                if config.criterion == "cv":
                    tuned = cross_validate(
                        window_rows, template, k=config.k,
                        seed=int(tune_seeds[step]), grid_count=config.grid_count,
                        grid_floor=config.grid_floor,
                    )
                else:
                    tuned = bic_select(window_rows, template, grid_count=config.grid_count,
                                       grid_floor=config.grid_floor)
                current = replace(template, gamma=tuned.best_gamma)
            gammas[step] = current.gamma
            est = estimate_from_config(current, cov=sample_covariance(window_rows))
        else:
            est = estimate_from_config(template, cov=sample_covariance(window_rows), data=window_rows)
        weights = mvp_weights(est.omega)
        oos[step] = float(weights @ r[step + m])

    mean = float(oos.mean())
    risk = float(oos.std(ddof=1)) if steps > 1 else None
    sharpe = mean / risk if risk is not None and risk > 0.0 else None
    return BacktestReport(
        out_of_sample_returns=oos, mean=mean, risk=risk, sharpe=sharpe, gammas=gammas
    )
