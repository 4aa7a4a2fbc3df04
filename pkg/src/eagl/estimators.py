"""User-facing precision-matrix estimators.

The entropy-adjusted graphical lasso (EAGL) augments the L1-penalized
likelihood with a log-determinant penalty weighted by ``(1 - alpha) * gamma``.
Absorbing that term into the likelihood shows the problem is an ordinary
graphical lasso on rescaled inputs: with ``c = 1 + (1 - alpha) * gamma`` the
minimizer of the augmented objective equals the minimizer of the L1 problem
on ``(S / c, alpha * gamma / c)``, so one solver serves both.

Also provided: the closed-form ridge estimators (plain and targeted), the
graphical elastic net (plain and targeted, solved by ADMM), a Ledoit-Wolf
shrinkage baseline, the identity baseline, and threshold sparsification.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError
from .glasso import (
    GlassoProblem,
    SolveReport,
    solve_glasso,
    stationarity_residual,
)
from .linalg import (
    cholesky_lower,
    invert_pd,
    is_positive_definite,
    sample_covariance,
    sym_eigen,
    sym_matrix,
    symmetrize,
)
from .metrics import partial_correlations
from .prox import penalized_objective

METHODS = ("eagl", "glasso", "gen", "tgen", "gridge", "tgridge", "ledoit_wolf", "naive")
GAMMA_METHODS = ("eagl", "glasso", "gen", "tgen", "gridge", "tgridge")


@dataclass(frozen=True)
class EstimatorConfig:
    """Declarative description of one estimator invocation."""

    method: str = "eagl"
    gamma: float = 0.0
    alpha: float = 0.5
    target: np.ndarray | None = None
    tol: float = 1e-6
    max_iter: int = 1000
    penalize_diagonal: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise InputError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not 0.0 <= self.alpha <= 1.0:
            raise InputError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.gamma < 0.0:
            raise InputError(f"gamma must be nonnegative, got {self.gamma}")
        if self.target is not None:
            object.__setattr__(self, "target", sym_matrix(self.target, max_asymmetry=1e-9))


@dataclass
class PrecisionEstimate:
    """An estimated precision matrix plus provenance.

    ``report`` is the solver report for iterative methods and ``None`` for
    closed forms. For EAGL, ``effective_problem`` records the rescaled
    instance actually handed to the L1 solver. ``objective`` is the value of
    the method's own objective at ``omega`` where one exists.
    """

    omega: np.ndarray
    config: EstimatorConfig
    report: SolveReport | None = None
    effective_problem: GlassoProblem | None = None
    objective: float | None = None
    shrinkage: float | None = None
    diagonal_shift: float = 0.0


def scaled_identity_target(cov) -> np.ndarray:
    """Default shrinkage target ``nu * I`` with ``nu = p / trace(S)``."""
    s = np.asarray(cov, dtype=np.float64)
    tr = float(np.trace(s))
    if tr <= 0:
        raise InputError("covariance trace must be positive to build the scaled identity target")
    return sym_matrix(np.eye(s.shape[0]) * (s.shape[0] / tr))


def eagl_objective(cov, omega, gamma, alpha, penalize_diagonal=True) -> float:
    """Entropy-adjusted objective: L1 likelihood plus the extra log-det term."""
    scale = 1.0 + (1.0 - alpha) * gamma
    om = np.asarray(omega, dtype=np.float64)
    L = cholesky_lower(om)
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    pen = float(np.sum(np.abs(om)))
    if not penalize_diagonal:
        pen -= float(np.sum(np.abs(np.diag(om))))
    return -scale * logdet + float(np.sum(om * np.asarray(cov))) + alpha * gamma * pen


def estimate_eagl(
    cov,
    gamma: float,
    alpha: float = 0.5,
    *,
    penalize_diagonal: bool = True,
    tol: float = 1e-6,
    max_iter: int = 1000,
    warm_start: SolveReport | None = None,
) -> PrecisionEstimate:
    """Entropy-adjusted graphical lasso via its rescaled-L1 reduction.

    At ``alpha == 1`` this is exactly the graphical lasso. At ``alpha == 0``
    the penalty is pure log-det and the closed form ``(1 + gamma) * S^{-1}``
    applies, which requires a positive definite sample covariance; singular
    input is refused rather than silently regularized.
    """
    s = sym_matrix(cov, max_asymmetry=1e-12)
    config = EstimatorConfig(
        method="eagl", gamma=gamma, alpha=alpha, tol=tol,
        max_iter=max_iter, penalize_diagonal=penalize_diagonal,
    )
    if alpha == 0.0:
        omega = sym_matrix((1.0 + gamma) * invert_pd(s))
        return PrecisionEstimate(
            omega=omega,
            config=config,
            objective=eagl_objective(s, omega, gamma, 0.0, penalize_diagonal),
        )
    if gamma <= 0.0:
        raise InputError("eagl requires gamma > 0 when alpha > 0 (gamma == 0 is the plain MLE)")
    scale = 1.0 + (1.0 - alpha) * gamma
    problem = GlassoProblem(
        cov=s / scale,
        gamma=alpha * gamma / scale,
        penalize_diagonal=penalize_diagonal,
        tol=tol,
        max_iter=max_iter,
    )
    report = solve_glasso(problem, warm_start=warm_start)
    return PrecisionEstimate(
        omega=report.omega,
        config=config,
        report=report,
        effective_problem=problem,
        objective=eagl_objective(s, report.omega, gamma, alpha, penalize_diagonal),
    )


def estimate_glasso(
    cov,
    gamma: float,
    *,
    penalize_diagonal: bool = True,
    tol: float = 1e-6,
    max_iter: int = 1000,
    warm_start: SolveReport | None = None,
) -> PrecisionEstimate:
    """Plain L1-penalized likelihood estimate."""
    problem = GlassoProblem(
        cov=cov, gamma=gamma, penalize_diagonal=penalize_diagonal, tol=tol, max_iter=max_iter
    )
    report = solve_glasso(problem, warm_start=warm_start)
    config = EstimatorConfig(
        method="glasso", gamma=gamma, tol=tol, max_iter=max_iter,
        penalize_diagonal=penalize_diagonal,
    )
    return PrecisionEstimate(
        omega=report.omega, config=config, report=report, objective=report.objective
    )


def estimate_gridge(cov, gamma: float, *, eigen=None) -> PrecisionEstimate:
    """Ridge-penalized likelihood, closed form through the spectrum of S.

    Each eigenvalue ``d`` of S maps to the positive root of
    ``2*gamma*x^2 + d*x - 1 = 0``; the eigenvectors carry over unchanged.
    """
    s = sym_matrix(cov, max_asymmetry=1e-12)
    if gamma <= 0:
        raise InputError("gridge requires gamma > 0")
    d, v = eigen if eigen is not None else sym_eigen(s)
    x = (-d + np.sqrt(d * d + 8.0 * gamma)) / (4.0 * gamma)
    omega = symmetrize((v * x) @ v.T)
    config = EstimatorConfig(method="gridge", gamma=gamma)
    return PrecisionEstimate(
        omega=omega,
        config=config,
        objective=penalized_objective(s, omega, 0.0, gamma),
    )


def estimate_t_gridge(cov, gamma: float, target=None) -> PrecisionEstimate:
    """Targeted ridge: closed form from the spectrum of ``E = S - gamma*T``.

    The inverse estimate is ``(gamma*I + E^2/4)^{1/2} + E/2``; the branch
    below evaluates its reciprocal eigenvalues without cancellation for
    negative spectrum.
    """
    s = sym_matrix(cov, max_asymmetry=1e-12)
    if gamma <= 0:
        raise InputError("tgridge requires gamma > 0")
    t = scaled_identity_target(s) if target is None else sym_matrix(target, max_asymmetry=1e-9)
    e = s - gamma * t
    d, v = sym_eigen(e)
    root = np.sqrt(gamma + d * d / 4.0)
    x = np.where(d >= 0, 1.0 / (root + d / 2.0), (root - d / 2.0) / gamma)
    omega = symmetrize((v * x) @ v.T)
    config = EstimatorConfig(method="tgridge", gamma=gamma, target=t)
    return PrecisionEstimate(
        omega=omega,
        config=config,
        objective=penalized_objective(s, omega, 0.0, gamma / 2.0, target=t),
    )


def _elastic_net_admm(
    s: np.ndarray,
    l1: float,
    l2: float,
    target: np.ndarray | None,
    tol: float,
    max_iter: int,
    init: np.ndarray | None = None,
    rho: float = 1.0,
) -> SolveReport:
    """ADMM on the consensus split of the elastic-net penalized likelihood.

    The likelihood block has an eigendecomposition closed form; the penalty
    block is the elementwise shift/soft-threshold/shrink proximal map. A
    different algorithm family from the proximal-gradient oracle on purpose,
    so the two can certify each other.
    """
    p = s.shape[0]
    t = np.zeros((p, p)) if target is None else np.asarray(target, dtype=np.float64)
    z = np.diag(1.0 / (np.diag(s) + l1 + 1.0)) if init is None else np.array(init, dtype=np.float64)
    u = np.zeros((p, p))
    omega = z.copy()
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        q = s - rho * (z - u)
        d, v = np.linalg.eigh((q + q.T) / 2.0)
        x = (-d + np.sqrt(d * d + 4.0 * rho)) / (2.0 * rho)
        omega = (v * x) @ v.T
        omega = (omega + omega.T) / 2.0
        z_old = z
        a = omega + u
        shifted = a - t
        shifted = np.sign(shifted) * np.maximum(np.abs(shifted) - l1 / rho, 0.0)
        z = t + shifted / (1.0 + 2.0 * l2 / rho)
        u = u + omega - z
        primal = float(np.linalg.norm(omega - z))
        dual = rho * float(np.linalg.norm(z - z_old))
        bound = tol * max(1.0, float(np.linalg.norm(omega)), float(np.linalg.norm(z)))
        if primal <= bound and dual <= bound:
            converged = True
            break
    # Prefer the penalty-block iterate: its zeros are exact. Fall back to the
    # always-PD likelihood iterate if thresholding nicked the spectrum.
    out = z if is_positive_definite(z) else omega
    sigma = invert_pd(out)
    kkt = stationarity_residual(s, out, sigma, l1=l1, l2=l2, target=target)
    return SolveReport(
        omega=sym_matrix(out, max_asymmetry=1e-12),
        sigma=sigma,
        objective=penalized_objective(s, out, l1, l2, target=target),
        iterations=iterations,
        converged=converged,
        kkt_residual=kkt,
        objective_trace=[],
    )


def estimate_gen(
    cov,
    gamma: float,
    alpha: float = 0.5,
    *,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    init=None,
) -> PrecisionEstimate:
    """Graphical elastic net: convex mix of L1 and squared-L2 penalties."""
    s = sym_matrix(cov, max_asymmetry=1e-12)
    if gamma <= 0:
        raise InputError("gen requires gamma > 0")
    if not 0.0 <= alpha <= 1.0:
        raise InputError("alpha must lie in [0, 1]")
    report = _elastic_net_admm(
        s, l1=gamma * alpha, l2=gamma * (1.0 - alpha), target=None,
        tol=tol, max_iter=max_iter, init=init,
    )
    config = EstimatorConfig(method="gen", gamma=gamma, alpha=alpha, tol=tol, max_iter=max_iter)
    return PrecisionEstimate(
        omega=report.omega, config=config, report=report, objective=report.objective
    )


def estimate_t_gen(
    cov,
    gamma: float,
    alpha: float = 0.5,
    target=None,
    *,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    init=None,
) -> PrecisionEstimate:
    """Targeted elastic net; the squared term carries the conventional 1/2."""
    s = sym_matrix(cov, max_asymmetry=1e-12)
    if gamma <= 0:
        raise InputError("tgen requires gamma > 0")
    t = scaled_identity_target(s) if target is None else sym_matrix(target, max_asymmetry=1e-9)
    report = _elastic_net_admm(
        s, l1=gamma * alpha, l2=gamma * (1.0 - alpha) / 2.0, target=t,
        tol=tol, max_iter=max_iter, init=init,
    )
    config = EstimatorConfig(
        method="tgen", gamma=gamma, alpha=alpha, target=t, tol=tol, max_iter=max_iter
    )
    return PrecisionEstimate(
        omega=report.omega, config=config, report=report, objective=report.objective
    )


def estimate_ledoit_wolf(x, shrinkage: float | None = None) -> PrecisionEstimate:
    """Inverse of a Ledoit-Wolf shrinkage covariance with scaled-identity target.

    The target is ``(trace(S)/p) * I`` and the intensity is the analytic
    plug-in estimate clipped to ``[0, 1]``; ``shrinkage`` overrides it.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] <= 2:
        raise InputError("ledoit_wolf needs an n-by-p data matrix with n > 2")
    n, p = x.shape
    xc = x - x.mean(axis=0)
    s = xc.T @ xc / n
    mu = float(np.trace(s)) / p
    if shrinkage is None:
        d2 = float(np.sum((s - mu * np.eye(p)) ** 2)) / p
        if d2 <= 0.0:
            delta = 1.0
        else:
            sq_norms = np.sum(xc * xc, axis=1)
            b2_bar = (float(np.sum(sq_norms**2)) - n * float(np.sum(s * s))) / (n * n * p)
            delta = min(1.0, max(0.0, b2_bar / d2))
    else:
        if not 0.0 <= shrinkage <= 1.0:
            raise InputError("shrinkage must lie in [0, 1]")
        delta = float(shrinkage)
    shrunk = delta * mu * np.eye(p) + (1.0 - delta) * s
    omega = invert_pd(symmetrize(shrunk))
    return PrecisionEstimate(
        omega=omega, config=EstimatorConfig(method="ledoit_wolf"), shrinkage=delta
    )


def estimate_naive(p: int) -> PrecisionEstimate:
    """Identity precision: the equal-weight baseline."""
    if p < 1:
        raise InputError("dimension must be at least 1")
    return PrecisionEstimate(omega=sym_matrix(np.eye(p)), config=EstimatorConfig(method="naive"))


def sparsify_threshold(
    estimate: PrecisionEstimate,
    rule: str = "absolute",
    value: float = 0.0,
) -> PrecisionEstimate:
    """Zero weak off-diagonal entries of an estimate.

    Rules:
      * ``absolute``        — zero entries with ``|omega_ij| <= value``;
      * ``pcorr_absolute``  — same test on partial correlations;
      * ``pcorr_sd``        — zero entries whose partial correlation is within
        ``value`` sample standard deviations of the nonzero partial
        correlations.

    The diagonal is untouched. If thresholding costs positive definiteness,
    the diagonal is shifted by ``|lambda_min| + 1e-6`` and the shift recorded.
    """
    om = np.array(estimate.omega, dtype=np.float64)
    p = om.shape[0]
    off = ~np.eye(p, dtype=bool)
    if rule == "absolute":
        kill = np.abs(om) <= value
    elif rule in ("pcorr_absolute", "pcorr_sd"):
        rho = np.abs(np.asarray(partial_correlations(om)))
        if rule == "pcorr_absolute":
            kill = rho <= value
        else:
            iu = np.triu_indices(p, 1)
            nonzero = rho[iu][rho[iu] > 0]
            sd = float(np.std(nonzero, ddof=1)) if nonzero.size >= 2 else 0.0
            kill = rho <= value * sd
    else:
        raise InputError(f"unknown sparsification rule {rule!r}")
    om[kill & off] = 0.0
    shift = 0.0
    if not is_positive_definite(om):
        lam_min = float(np.linalg.eigvalsh(om)[0])
        shift = abs(lam_min) + 1e-6
        om[np.diag_indices(p)] += shift
    return replace(
        estimate,
        omega=sym_matrix(om, max_asymmetry=1e-12),
        diagonal_shift=shift,
        objective=None,
    )


def estimate_from_config(
    config: EstimatorConfig,
    *,
    cov=None,
    data=None,
    warm_start=None,
) -> PrecisionEstimate:
    """Dispatch one configured estimator on a covariance and/or raw data.

    ``warm_start`` is a previous ``SolveReport`` for the L1 family or a
    previous precision matrix for the elastic-net family; closed forms
    ignore it.
    """
    method = config.method
    if method == "ledoit_wolf":
        if data is None:
            raise InputError("ledoit_wolf estimates from raw data rows")
        return estimate_ledoit_wolf(data)
    if cov is None:
        if data is None:
            raise InputError("need a covariance matrix or data rows")
        cov = sample_covariance(data)
    if method == "naive":
        return estimate_naive(np.asarray(cov).shape[0])
    if method == "eagl":
        return estimate_eagl(
            cov, config.gamma, config.alpha,
            penalize_diagonal=config.penalize_diagonal,
            tol=config.tol, max_iter=config.max_iter, warm_start=warm_start,
        )
    if method == "glasso":
        return estimate_glasso(
            cov, config.gamma,
            penalize_diagonal=config.penalize_diagonal,
            tol=config.tol, max_iter=config.max_iter, warm_start=warm_start,
        )
    if method == "gridge":
        return estimate_gridge(cov, config.gamma)
    if method == "tgridge":
        return estimate_t_gridge(cov, config.gamma, config.target)
    if not config.penalize_diagonal:
        raise InputError(f"{method} supports only the fully penalized (diagonal included) form")
    if method == "gen":
        return estimate_gen(cov, config.gamma, config.alpha, init=warm_start)
    if method == "tgen":
        return estimate_t_gen(cov, config.gamma, config.alpha, config.target, init=warm_start)
    raise InputError(f"unknown method {method!r}")
