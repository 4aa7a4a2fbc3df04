import numpy as np
import pytest

from eagl.errors import InputError
from eagl.glasso import GlassoProblem, solve_glasso
from eagl.linalg import invert_pd
from eagl.prox import penalized_objective, proximal_oracle

from conftest import random_pd


class TestUnpenalizedLimit:
    def test_recovers_plain_inverse(self, rng):
        s = random_pd(5, rng)
        rep = proximal_oracle(s, 0.0, 0.0)
        assert rep.converged
        assert np.max(np.abs(rep.omega - invert_pd(s))) <= 1e-6


class TestRidgeAgreement:
    def test_matches_ridge_closed_form(self, rng):
        # Stationarity -W + S + 2*gamma*O = 0 solved in the eigenbasis of S.
        s = random_pd(6, rng)
        gamma = 0.35
        d, v = np.linalg.eigh(s)
        x = (-d + np.sqrt(d * d + 8 * gamma)) / (4 * gamma)
        closed = (v * x) @ v.T
        rep = proximal_oracle(s, 0.0, gamma)
        assert np.max(np.abs(rep.omega - closed)) <= 1e-6
        assert abs(rep.objective - penalized_objective(s, closed, 0.0, gamma)) <= 1e-9

    def test_matches_targeted_ridge_closed_form(self, rng):
        s = random_pd(5, rng)
        gamma = 0.5
        t = 0.8 * np.eye(5)
        e = s - gamma * t
        d, v = np.linalg.eigh(e)
        root = np.sqrt(gamma + d * d / 4.0)
        x = np.where(d >= 0, 1.0 / (root + d / 2.0), (root - d / 2.0) / gamma)
        closed = (v * x) @ v.T
        rep = proximal_oracle(s, 0.0, gamma / 2.0, shift_target=t)
        assert np.max(np.abs(rep.omega - closed)) <= 1e-6


class TestLassoAgreement:
    def test_matches_coordinate_descent_objective(self, rng):
        # Two independent solvers on the same instance (p=5 random PD).
        s = random_pd(5, rng)
        gamma = 0.12
        cd = solve_glasso(GlassoProblem(s, gamma, tol=1e-8))
        oracle = proximal_oracle(s, gamma, 0.0)
        assert abs(cd.objective - oracle.objective) <= 1e-6

    def test_scaled_logdet_family(self, rng):
        # The scaled-likelihood form used by the entropy-adjusted reduction.
        s = random_pd(5, rng)
        scale = 1.2
        rep = proximal_oracle(s, 0.1, 0.0, logdet_scale=scale)
        assert rep.converged
        assert rep.kkt_residual <= 1e-6


class TestInterface:
    def test_rejects_bad_weights(self):
        with pytest.raises(InputError):
            proximal_oracle(np.eye(3), -0.1, 0.0)
        with pytest.raises(InputError):
            proximal_oracle(np.eye(3), 0.0, 0.0, logdet_scale=0.0)

    def test_caller_supplied_init(self, rng):
        s = random_pd(4, rng)
        rep = proximal_oracle(s, 0.05, 0.0, init=np.eye(4))
        default = proximal_oracle(s, 0.05, 0.0)
        assert abs(rep.objective - default.objective) <= 1e-7

    def test_budget_exhaustion_flagged(self, rng):
        s = random_pd(6, rng)
        rep = proximal_oracle(s, 0.05, 0.0, max_iter=3)
        assert not rep.converged
        assert rep.iterations == 3

    def test_exact_zeros_from_soft_threshold(self, rng):
        s = random_pd(8, rng)
        gamma = 0.9 * float(np.max(np.abs(s - np.diag(np.diag(s)))))
        rep = proximal_oracle(s, gamma, 0.0)
        off = np.asarray(rep.omega)[np.triu_indices(8, 1)]
        assert np.any(off == 0.0)
