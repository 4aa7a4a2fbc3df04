"""Dense symmetric-matrix primitives used by every estimator and application.

All matrices are plain ``float64`` ndarrays. Constructors return read-only
arrays whose symmetry is bit-exact (entry ``(i, j)`` and ``(j, i)`` compare
equal bitwise), so values can be shared freely across threads.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.linalg import lapack as _lapack
from scipy.linalg import solve_triangular

from .errors import InputError, NotPositiveDefinite

# Accuracy contracts. Callers may override per call where a kwarg exists.
CHOLESKY_TOL = 1e-10
EIGEN_TOL = 1e-8
INVERT_TOL = 1e-8
CSV_SYMMETRY_TOL = 1e-9


class EigenDecomposition(NamedTuple):
    """Spectral factorization ``A = V diag(w) V^T`` with ``w`` nondecreasing."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def sym_matrix(values, *, max_asymmetry: float = 0.0) -> np.ndarray:
    """Validate and freeze a symmetric matrix.

    The input must be square with finite entries and symmetric up to
    ``max_asymmetry`` in the max norm. The result is the symmetric average
    ``(A + A^T) / 2`` (bit-symmetric because IEEE addition commutes), marked
    read-only.
    """
    a = np.array(values, dtype=np.float64, order="C")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise InputError("matrix dimension must be at least 1")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix contains non-finite entries")
    gap = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if gap > max_asymmetry:
        raise InputError(
            f"matrix is not symmetric (max asymmetry {gap:.3e} > {max_asymmetry:.3e})"
        )
    a = (a + a.T) / 2.0
    a.flags.writeable = False
    return a


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Freeze ``(A + A^T) / 2`` without an asymmetry check.

    For trusted internal results (eigenvector reconstructions, solver
    iterates) that are symmetric up to roundoff.
    """
    return sym_matrix(a, max_asymmetry=np.inf)


def cholesky_lower(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor ``L`` with ``L L^T = A``.

    Raises :class:`NotPositiveDefinite` carrying the zero-based index of the
    failing pivot when ``A`` is not positive definite.
    """
    a = np.asarray(a, dtype=np.float64)
    c, info = _lapack.dpotrf(a, lower=1, clean=1, overwrite_a=0)
    if info > 0:
        raise NotPositiveDefinite(
            f"matrix is not positive definite (pivot {info - 1})", pivot=info - 1
        )
    if info < 0:
        raise InputError(f"invalid matrix passed to Cholesky (lapack info {info})")
    return c


def is_positive_definite(a: np.ndarray) -> bool:
    try:
        cholesky_lower(a)
    except NotPositiveDefinite:
        return False
    return True


def log_det_pd(a: np.ndarray) -> float:
    """log-determinant of a positive definite matrix via its Cholesky factor."""
    L = cholesky_lower(a)
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def sym_eigen(a: np.ndarray) -> EigenDecomposition:
    """Full eigendecomposition of a symmetric matrix, eigenvalues ascending."""
    a = np.asarray(a, dtype=np.float64)
    w, v = np.linalg.eigh(a)
    return EigenDecomposition(eigenvalues=w, eigenvectors=v)


def invert_pd(a: np.ndarray) -> np.ndarray:
    """Inverse of a positive definite matrix, returned symmetric read-only."""
    L = cholesky_lower(a)
    inv, info = _lapack.dpotri(L, lower=1, overwrite_c=0)
    if info != 0:
        raise NotPositiveDefinite(f"inversion from Cholesky failed (info {info})")
    # dpotri fills one triangle only; mirror it.
    out = np.tril(inv) + np.tril(inv, -1).T
    out.flags.writeable = False
    return out


def sample_covariance(x: np.ndarray) -> np.ndarray:
    """Sample covariance ``(1/n) Xc^T Xc`` of mean-centered columns.

    The divisor is ``n``, not ``n - 1``. Requires ``n >= 2`` rows.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise InputError(f"expected an n-by-p data matrix, got shape {x.shape}")
    n, p = x.shape
    if n < 2 or p < 1:
        raise InputError(f"need at least 2 rows and 1 column, got {n}x{p}")
    if not np.all(np.isfinite(x)):
        raise InputError("data matrix contains non-finite entries")
    return centered_second_moment(x)


def centered_second_moment(x: np.ndarray) -> np.ndarray:
    """``(1/n) Xc^T Xc`` tolerating a single row (which centers to zero).

    Internal variant used for held-out cross-validation folds where a fold
    may contain one observation.
    """
    x = np.asarray(x, dtype=np.float64)
    xc = x - x.mean(axis=0)
    s = xc.T @ xc / x.shape[0]
    return symmetrize(s)


def mvn_rows(omega: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` i.i.d. rows from ``N(0, omega^{-1})`` without forming the covariance.

    Solves ``L^T x = z`` with ``omega = L L^T`` and ``z`` standard normal, so
    ``cov(x) = omega^{-1}`` exactly.
    """
    L = cholesky_lower(omega)
    z = rng.standard_normal((n, omega.shape[0]))
    return solve_triangular(L, z.T, lower=True, trans=1).T


def load_csv(path, header: bool = False) -> np.ndarray:
    """Load a plain numeric CSV (no header unless ``header=True`` skips one line)."""
    try:
        a = np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2)
    except OSError:
        raise
    except Exception as exc:
        raise InputError(f"could not parse numeric CSV {path}: {exc}") from exc
    if not np.all(np.isfinite(a)):
        raise InputError(f"{path} contains non-finite entries")
    return a


def load_sym_csv(path, header: bool = False, tol: float = CSV_SYMMETRY_TOL) -> np.ndarray:
    """Load a symmetric matrix CSV, validate symmetry to ``tol``, symmetrize by averaging."""
    a = load_csv(path, header=header)
    return sym_matrix(a, max_asymmetry=tol)


def save_matrix_csv(path, a: np.ndarray) -> None:
    """Write a matrix as plain numeric CSV, one row per line, full precision."""
    np.savetxt(path, np.atleast_2d(np.asarray(a, dtype=np.float64)), delimiter=",", fmt="%.17g")
