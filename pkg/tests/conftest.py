import numpy as np
import pytest


def random_pd(p: int, rng: np.random.Generator, *, cond_shift: float = 0.1) -> np.ndarray:
    """Well-conditioned random positive definite matrix via a Gram construction."""
    a = rng.standard_normal((2 * p, p))
    s = a.T @ a / (2 * p) + cond_shift * np.eye(p)
    return (s + s.T) / 2.0


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
