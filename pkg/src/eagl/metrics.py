"""Statistical losses, edge-recovery scores, partial correlations, entropy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .errors import InputError, NotPositiveDefinite
from .linalg import cholesky_lower, log_det_pd, sym_matrix

ZERO_TOL = 1e-8
_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class LossReport:
    """Divergences and norms of an estimate against a reference precision matrix."""

    kll: float
    rkll: float
    rte: float
    frobenius: float
    spectral: float
    matrix_l1: float

    def to_json_dict(self) -> dict:
        return {
            "kll": self.kll,
            "rkll": self.rkll,
            "rte": self.rte,
            "l2": self.frobenius,
            "lsp": self.spectral,
            "l1": self.matrix_l1,
        }


@dataclass(frozen=True)
class GraphReport:
    """Upper-triangle edge-recovery confusion counts and summary scores."""

    tp: int
    tn: int
    fp: int
    fn: int
    mcc: float
    umcc: float
    ba: float

    def to_json_dict(self) -> dict:
        return {
            "tp": self.tp,
            "tn": self.tn,
            "fp": self.fp,
            "fn": self.fn,
            "mcc": self.mcc,
            "umcc": self.umcc,
            "ba": self.ba,
        }


def loss_report(omega_hat, omega) -> LossReport:
    """All six losses of ``omega_hat`` against the reference ``omega``.

    Kullback-Leibler losses are computed through Cholesky solves; the tiny
    negative values float noise can produce at near-equality are rounded up
    to zero (both divergences are nonnegative for positive definite pairs).
    """
    oh = np.asarray(omega_hat, dtype=np.float64)
    om = np.asarray(omega, dtype=np.float64)
    if oh.shape != om.shape:
        raise InputError(f"shape mismatch: {oh.shape} vs {om.shape}")
    p = om.shape[0]
    l_ref = cholesky_lower(om)
    l_hat = cholesky_lower(oh)
    logdet_ref = 2.0 * float(np.sum(np.log(np.diag(l_ref))))
    logdet_hat = 2.0 * float(np.sum(np.log(np.diag(l_hat))))
    kll = float(np.trace(cho_solve((l_ref, True), oh))) - (logdet_hat - logdet_ref) - p
    rkll = float(np.trace(cho_solve((l_hat, True), om))) - (logdet_ref - logdet_hat) - p
    diff = oh - om
    return LossReport(
        kll=max(0.0, kll),
        rkll=max(0.0, rkll),
        rte=abs(1.0 - float(np.trace(oh)) / float(np.trace(om))),
        frobenius=float(np.linalg.norm(diff)),
        spectral=float(np.max(np.abs(np.linalg.eigvalsh((diff + diff.T) / 2.0)))),
        matrix_l1=float(np.max(np.sum(np.abs(diff), axis=0))),
    )


def confusion_scores(tp: int, tn: int, fp: int, fn: int) -> tuple[float, float, float]:
    """(MCC, uMCC, BA) from confusion counts.

    MCC is 0 by convention when any denominator factor vanishes. A class
    absent from the truth counts as perfectly recovered in BA, so both
    scores equal 1 whenever the confusion matrix is diagonal.
    """
    factors = (tp + fp, tp + fn, tn + fp, tn + fn)
    if any(f == 0 for f in factors):
        mcc = 0.0
    else:
        num = tp * tn - fp * fn
        mcc = num / float(np.sqrt(float(factors[0]) * factors[1] * factors[2] * factors[3]))
    sensitivity = tp / (tp + fn) if (tp + fn) > 0 else 1.0
    specificity = tn / (tn + fp) if (tn + fp) > 0 else 1.0
    ba = 0.5 * (sensitivity + specificity)
    return mcc, (mcc + 1.0) / 2.0, ba


def graph_report(omega_hat, omega, zero_tol: float = ZERO_TOL) -> GraphReport:
    """Edge-recovery confusion over all upper-triangle pairs.

    A pair is predicted nonzero when ``|omega_hat_ij| > zero_tol`` (solver
    zeros are exact, but certified solutions carry float dust); a pair is
    truly nonzero iff the reference entry is exactly nonzero.
    """
    oh = np.asarray(omega_hat, dtype=np.float64)
    om = np.asarray(omega, dtype=np.float64)
    if oh.shape != om.shape:
        raise InputError(f"shape mismatch: {oh.shape} vs {om.shape}")
    if zero_tol < 0:
        raise InputError("zero_tol must be nonnegative")
    iu = np.triu_indices(om.shape[0], 1)
    predicted = np.abs(oh[iu]) > zero_tol
    actual = om[iu] != 0.0
    tp = int(np.sum(predicted & actual))
    tn = int(np.sum(~predicted & ~actual))
    fp = int(np.sum(predicted & ~actual))
    fn = int(np.sum(~predicted & actual))
    mcc, umcc, ba = confusion_scores(tp, tn, fp, fn)
    return GraphReport(tp=tp, tn=tn, fp=fp, fn=fn, mcc=mcc, umcc=umcc, ba=ba)


def partial_correlations(omega) -> np.ndarray:
    """Partial correlation matrix: ``-omega_ij / sqrt(omega_ii * omega_jj)``, unit diagonal."""
    om = np.asarray(omega, dtype=np.float64)
    d = np.diag(om)
    if np.any(d <= 0):
        bad = int(np.argmax(d <= 0))
        raise NotPositiveDefinite(f"diagonal entry {bad} is not positive", pivot=bad)
    scale = np.sqrt(d)
    rho = -om / np.outer(scale, scale)
    np.fill_diagonal(rho, 1.0)
    return sym_matrix(rho, max_asymmetry=1e-12)


def gaussian_entropy(omega) -> float:
    """Differential entropy of ``N(mu, omega^{-1})``: ``(p/2)(1+log 2pi) + H_core/2``."""
    om = np.asarray(omega, dtype=np.float64)
    p = om.shape[0]
    return 0.5 * p * (1.0 + _LOG_2PI) + 0.5 * gaussian_entropy_core(om)


def gaussian_entropy_core(omega) -> float:
    """Data-dependent entropy term ``log det(omega^{-1}) = -sum(log eigenvalues)``."""
    return -log_det_pd(np.asarray(omega, dtype=np.float64))
