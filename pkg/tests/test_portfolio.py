import numpy as np
import pytest

from eagl.errors import InputError, NumericalError
from eagl.estimators import EstimatorConfig
from eagl.linalg import mvn_rows
from eagl.models import generate_model, ModelSpec, sample_mvn
from eagl.portfolio import BacktestConfig, backtest, mvp_weights

from conftest import random_pd


class TestWeights:
    def test_identity_gives_equal_weights(self):
        for p in (1, 4, 9):
            assert np.array_equal(mvp_weights(np.eye(p)), np.full(p, 1.0 / p))

    def test_diagonal_case(self):
        # omega 1 = (1, 0.25), normalized -> (0.8, 0.2)
        assert np.allclose(mvp_weights(np.diag([1.0, 0.25])), [0.8, 0.2])

    def test_permutation_equivariance(self, rng):
        om = random_pd(5, rng)
        perm = np.array([3, 0, 4, 1, 2])
        w = mvp_weights(om)
        w_perm = mvp_weights(om[np.ix_(perm, perm)])
        assert np.allclose(w_perm, w[perm], atol=1e-14)

    def test_sums_to_one(self, rng):
        for _ in range(5):
            w = mvp_weights(random_pd(8, rng))
            assert abs(w.sum() - 1.0) <= 1e-12

    def test_nonpositive_normalizer_guarded(self):
        # Indefinite input slips past the PD precondition; the guard catches it.
        om = np.array([[1.0, -2.0], [-2.0, 1.0]])
        with pytest.raises(NumericalError):
            mvp_weights(om)


class TestBacktest:
    def test_constant_returns_zero_risk(self):
        row = np.array([0.01, 0.03, 0.02])
        returns = np.tile(row, (12, 1))
        config = BacktestConfig(
            returns=returns, window=4,
            template=EstimatorConfig(method="naive"), criterion=None,
        )
        report = backtest(config)
        assert np.allclose(report.out_of_sample_returns, row.mean())
        assert report.risk == pytest.approx(0.0, abs=1e-15)
        assert report.sharpe is None

    def test_naive_reproduces_equal_weight_series(self, rng):
        returns = rng.standard_normal((30, 5)) * 0.02
        config = BacktestConfig(
            returns=returns, window=10,
            template=EstimatorConfig(method="naive"), criterion=None,
        )
        report = backtest(config)
        w_equal = np.full(5, 0.2)
        expected = np.array([float(w_equal @ returns[t]) for t in range(10, 30)])
        assert np.array_equal(report.out_of_sample_returns, expected)
        assert np.allclose(report.out_of_sample_returns, returns[10:].mean(axis=1))

    def test_window_boundary_single_return(self, rng):
        returns = rng.standard_normal((8, 3))
        config = BacktestConfig(
            returns=returns, window=7,
            template=EstimatorConfig(method="naive"), criterion=None,
        )
        report = backtest(config)
        assert report.out_of_sample_returns.size == 1
        assert report.risk is None and report.sharpe is None

    def test_true_precision_beats_naive_variance(self):
        # Known covariance with heterogeneous spread: weights from the true
        # precision matrix give out-of-sample variance at most the naive one.
        rng = np.random.default_rng(7)
        p, n, m = 10, 400, 150
        truth = generate_model(ModelSpec(2, p, seed=3))
        omega = np.asarray(truth.omega)
        returns = mvn_rows(omega, n, rng) * 0.01
        w_true = mvp_weights(omega)
        oos_true = returns[m:] @ w_true
        oos_naive = returns[m:].mean(axis=1)
        assert oos_true.var(ddof=1) <= oos_naive.var(ddof=1)

    def test_tuned_backtest_runs_and_is_deterministic(self):
        truth = generate_model(ModelSpec(1, 6, seed=2))
        returns = sample_mvn(truth, 40, seed=5) * 0.01
        config = BacktestConfig(
            returns=returns, window=25,
            template=EstimatorConfig(method="eagl", alpha=0.5),
            criterion="cv", retune_every=5, seed=3, grid_count=5,
        )
        a = backtest(config)
        b = backtest(config)
        assert np.array_equal(a.out_of_sample_returns, b.out_of_sample_returns)
        assert np.array_equal(a.gammas, b.gammas)
        # retune cadence: gamma is constant within each 5-window block
        blocks = a.gammas.reshape(3, 5)
        assert np.all(blocks == blocks[:, :1])

    def test_fixed_gamma_mode_requires_positive_gamma(self, rng):
        returns = rng.standard_normal((20, 3))
        config = BacktestConfig(
            returns=returns, window=10,
            template=EstimatorConfig(method="glasso"), criterion=None,
        )
        with pytest.raises(InputError):
            backtest(config)

    def test_sharpe_definition(self, rng):
        returns = rng.standard_normal((30, 4)) * 0.02 + 0.005
        config = BacktestConfig(
            returns=returns, window=12,
            template=EstimatorConfig(method="naive"), criterion=None,
        )
        report = backtest(config)
        assert report.sharpe == pytest.approx(report.mean / report.risk)
        # mean uses divisor n - m, risk uses n - m - 1
        oos = report.out_of_sample_returns
        assert report.mean == pytest.approx(oos.sum() / oos.size)
        assert report.risk == pytest.approx(np.sqrt(((oos - oos.mean()) ** 2).sum() / (oos.size - 1)))

    def test_window_validation(self, rng):
        returns = rng.standard_normal((10, 3))
        with pytest.raises(InputError):
            BacktestConfig(returns=returns, window=10,
                           template=EstimatorConfig(method="naive"))
        with pytest.raises(InputError):
            BacktestConfig(returns=returns, window=1,
                           template=EstimatorConfig(method="naive"))

    def test_json_payload(self, rng):
        returns = rng.standard_normal((15, 3))
        report = backtest(BacktestConfig(
            returns=returns, window=10,
            template=EstimatorConfig(method="naive"), criterion=None,
        ))
        payload = report.to_json_dict()
        assert payload["n_windows"] == 5
        assert len(payload["out_of_sample_returns"]) == 5
