"""Two-group linear discriminant classification driven by a precision estimate."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError
from .estimators import EstimatorConfig, estimate_from_config
from .linalg import symmetrize
from .metrics import confusion_scores
from .tuning import GRID_COUNT, GRID_FLOOR_RATIO, bic_select, cross_validate


@dataclass(frozen=True)
class LdaModel:
    """Fitted discriminant direction: ``a = omega (mu1 - mu2)``, midpoint ``mu``."""

    mu1: np.ndarray
    mu2: np.ndarray
    omega: np.ndarray
    a: np.ndarray
    mu: np.ndarray


@dataclass(frozen=True)
class LdaExperimentReport:
    """Replication-averaged test performance of the screening + LDA pipeline."""

    misclassification: float
    umcc: float
    ba: float
    replications: int
    skipped_features: int


def lda_fit(x1, x2, omega) -> LdaModel:
    """Group means from the rows of each training matrix, direction from ``omega``."""
    x1 = np.atleast_2d(np.asarray(x1, dtype=np.float64))
    x2 = np.atleast_2d(np.asarray(x2, dtype=np.float64))
    omega = np.asarray(omega, dtype=np.float64)
    if x1.shape[1] != x2.shape[1] or omega.shape != (x1.shape[1], x1.shape[1]):
        raise InputError("group data and precision matrix dimensions do not match")
    mu1 = x1.mean(axis=0)
    mu2 = x2.mean(axis=0)
    return LdaModel(mu1=mu1, mu2=mu2, omega=omega, a=omega @ (mu1 - mu2), mu=(mu1 + mu2) / 2.0)


def lda_classify(model: LdaModel, x) -> int:
    """Group 1 iff the discriminant score is strictly positive; the boundary is group 2."""
    score = float(model.a @ (np.asarray(x, dtype=np.float64) - model.mu))
    return 1 if score > 0.0 else 2


def lda_classify_rows(model: LdaModel, x) -> np.ndarray:
    scores = (np.atleast_2d(np.asarray(x, dtype=np.float64)) - model.mu) @ model.a
    return np.where(scores > 0.0, 1, 2)


def welch_t_statistics(x1: np.ndarray, x2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-feature Welch t statistics and a mask of degenerate features.

    A feature whose pooled standard-error denominator vanishes (constant in
    both groups) is masked out rather than scored.
    """
    n1, n2 = x1.shape[0], x2.shape[0]
    v1 = x1.var(axis=0, ddof=1) if n1 > 1 else np.zeros(x1.shape[1])
    v2 = x2.var(axis=0, ddof=1) if n2 > 1 else np.zeros(x2.shape[1])
    denom = np.sqrt(v1 / n1 + v2 / n2)
    usable = denom > 0.0
    t = np.zeros(x1.shape[1])
    t[usable] = (x1.mean(axis=0) - x2.mean(axis=0))[usable] / denom[usable]
    return t, ~usable


def _pooled_within_group_cov(x1: np.ndarray, x2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # The discriminant model assumes one common covariance, so pool the
    # within-group residuals; divisor n matches the covariance convention.
    r1 = x1 - x1.mean(axis=0)
    r2 = x2 - x2.mean(axis=0)
    stacked = np.vstack([r1, r2])
    return symmetrize(stacked.T @ stacked / stacked.shape[0]), stacked


def lda_experiment(
    x1,
    x2,
    train1: int,
    train2: int,
    n_features: int,
    template: EstimatorConfig,
    replications: int = 100,
    seed: int = 0,
    criterion: str = "cv",
    k: int = 5,
    grid_count: int = GRID_COUNT,
    grid_floor: float = GRID_FLOOR_RATIO,
) -> LdaExperimentReport:
    """Repeated split / screen / estimate / classify pipeline.

    Each replication draws a seeded train/test split per group, ranks
    features by absolute Welch t statistic on the training rows (ties broken
    by feature index), keeps the top ``n_features``, tunes the penalty on the
    pooled within-group training residuals, fits the precision matrix, and
    classifies the held-out rows. Group 1 plays the positive class in the
    confusion scores. Metrics are averaged over replications.
    """
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    if x1.ndim != 2 or x2.ndim != 2 or x1.shape[1] != x2.shape[1]:
        raise InputError("group matrices must share the feature dimension")
    n1, n2 = x1.shape[0], x2.shape[0]
    if not (1 <= train1 < n1 and 1 <= train2 < n2):
        raise InputError("training sizes must leave at least one test row per group")
    if replications < 1:
        raise InputError("need at least one replication")
    n_features = min(n_features, x1.shape[1])

    children = np.random.SeedSequence(seed).spawn(replications)
    miss, umccs, bas = [], [], []
    skipped_total = 0
    for child in children:
        rng = np.random.default_rng(child)
        idx1 = rng.permutation(n1)
        idx2 = rng.permutation(n2)
        tr1, te1 = x1[idx1[:train1]], x1[idx1[train1:]]
        tr2, te2 = x2[idx2[:train2]], x2[idx2[train2:]]

        t_stats, skipped = welch_t_statistics(tr1, tr2)
        skipped_total += int(np.sum(skipped))
        ranking = np.lexsort((np.arange(t_stats.size), -np.abs(t_stats)))
        keep = np.sort(ranking[:n_features])

        tr1k, tr2k = tr1[:, keep], tr2[:, keep]
        s_train, residuals = _pooled_within_group_cov(tr1k, tr2k)
        if criterion == "cv":
            tuned = cross_validate(
                residuals, template, k=k,
                seed=int(rng.integers(2**63)), grid_count=grid_count,
                grid_floor=grid_floor,
            )
        elif criterion == "bic":
            tuned = bic_select(residuals, template, grid_count=grid_count,
                               grid_floor=grid_floor)
        else:
            raise InputError(f"unknown criterion {criterion!r}")
        est = estimate_from_config(replace(template, gamma=tuned.best_gamma), cov=s_train)
        model = lda_fit(tr1k, tr2k, est.omega)

        pred1 = lda_classify_rows(model, te1[:, keep])
        pred2 = lda_classify_rows(model, te2[:, keep])
        tp = int(np.sum(pred1 == 1))
        fn = int(np.sum(pred1 == 2))
        tn = int(np.sum(pred2 == 2))
        fp = int(np.sum(pred2 == 1))
        mcc, umcc, ba = confusion_scores(tp, tn, fp, fn)
        miss.append((fn + fp) / (tp + tn + fp + fn))
        umccs.append(umcc)
        bas.append(ba)

    return LdaExperimentReport(
        misclassification=float(np.mean(miss)),
        umcc=float(np.mean(umccs)),
        ba=float(np.mean(bas)),
        replications=replications,
        skipped_features=skipped_total,
    )
