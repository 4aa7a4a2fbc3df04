import numpy as np
import pytest

from eagl.errors import InputError
from eagl.linalg import cholesky_lower, sample_covariance
from eagl.models import ModelSpec, generate_model, sample_mvn


def analytic_edge_count(model_id: int, p: int) -> int:
    if model_id == 1:
        return p - 1
    if model_id == 2:
        return 2 * p - 3
    if model_id == 3:
        b = p // 4
        return 4 * (b * (b - 1) // 2)
    if model_id == 6:
        return p
    if model_id == 7:
        return p - 10
    raise ValueError(model_id)


class TestSpecValidation:
    def test_block_model_divisibility(self):
        with pytest.raises(InputError):
            ModelSpec(3, 10)

    def test_hub_model_divisibility(self):
        with pytest.raises(InputError):
            ModelSpec(7, 50)

    def test_unknown_model(self):
        with pytest.raises(InputError):
            ModelSpec(8, 10)


class TestStructures:
    def test_band_small(self):
        truth = generate_model(ModelSpec(1, 3))
        expected = np.array([[1.0, 0.45, 0.0], [0.45, 1.0, 0.45], [0.0, 0.45, 1.0]])
        assert np.array_equal(truth.omega, expected)
        assert truth.edge_set == {(0, 1), (1, 2)}

    def test_double_band_values(self):
        truth = generate_model(ModelSpec(2, 4))
        om = np.asarray(truth.omega)
        # Unit diagonal before standardization, so values survive unchanged.
        assert om[0, 1] == pytest.approx(0.5)
        assert om[0, 2] == pytest.approx(0.35)
        assert om[0, 3] == 0.0

    def test_block_structure(self):
        truth = generate_model(ModelSpec(3, 8))
        om = np.asarray(truth.omega)
        block = np.array([[1.0, 0.6], [0.6, 1.0]])
        for b in range(4):
            lo = 2 * b
            assert np.allclose(om[lo : lo + 2, lo : lo + 2], block)
        assert om[0, 2] == 0.0
        assert truth.edge_count == 4

    @pytest.mark.parametrize("model_id", [1, 2, 3, 6, 7])
    @pytest.mark.parametrize("p", [40, 100])
    def test_edge_counts_exact(self, model_id, p):
        truth = generate_model(ModelSpec(model_id, p, seed=17))
        assert truth.edge_count == analytic_edge_count(model_id, p)

    @pytest.mark.parametrize("model_id", [1, 2, 3, 4, 5, 6, 7])
    def test_pd_and_unit_diagonal(self, model_id):
        p = 40
        truth = generate_model(ModelSpec(model_id, p, seed=3))
        om = np.asarray(truth.omega)
        cholesky_lower(om)
        assert np.max(np.abs(np.diag(om) - 1.0)) <= 1e-12
        assert np.array_equal(om, om.T)

    def test_random_graph_expected_edges(self):
        # Total edges over 20 independent draws is binomial with
        # m = 20 * C(p,2) trials at rate 0.05; stay within 4 sd of the mean.
        p = 40
        pairs = p * (p - 1) // 2
        total = sum(
            generate_model(ModelSpec(5, p, seed=1000 + i)).edge_count for i in range(20)
        )
        mean = 20 * pairs * 0.05
        sd = np.sqrt(20 * pairs * 0.05 * 0.95)
        assert abs(total - mean) <= 4 * sd

    def test_random_dense_density(self):
        # Roughly half the off-diagonal pairs are active.
        p = 60
        truth = generate_model(ModelSpec(4, p, seed=2))
        pairs = p * (p - 1) // 2
        assert abs(truth.edge_count / pairs - 0.5) < 0.08

    def test_edge_set_matches_matrix_support(self):
        truth = generate_model(ModelSpec(5, 30, seed=9))
        om = np.asarray(truth.omega)
        i, j = np.nonzero(np.triu(om, 1))
        assert truth.edge_set == set(zip(i.tolist(), j.tolist()))

    def test_determinism(self):
        a = generate_model(ModelSpec(6, 40, seed=11))
        b = generate_model(ModelSpec(6, 40, seed=11))
        assert np.array_equal(a.omega, b.omega)
        assert a.edge_set == b.edge_set
        c = generate_model(ModelSpec(6, 40, seed=12))
        assert not np.array_equal(a.omega, c.omega)


class TestSampling:
    def test_identity_monte_carlo(self):
        x = sample_mvn(np.eye(2), 100_000, seed=4)
        assert np.max(np.abs(sample_covariance(x) - np.eye(2))) <= 0.02

    def test_diagonal_scaling(self):
        # Omega = diag(4, 1) means the first column has variance 1/4.
        x = sample_mvn(np.diag([4.0, 1.0]), 200_000, seed=8)
        assert np.var(x[:, 0]) == pytest.approx(0.25, abs=0.01)

    def test_bit_identical_given_seed(self):
        truth = generate_model(ModelSpec(1, 10, seed=0))
        a = sample_mvn(truth, 50, seed=21)
        b = sample_mvn(truth, 50, seed=21)
        assert np.array_equal(a, b)

    def test_covariance_matches_inverse_truth(self):
        truth = generate_model(ModelSpec(2, 6, seed=1))
        x = sample_mvn(truth, 300_000, seed=2)
        sigma = np.linalg.inv(np.asarray(truth.omega))
        assert np.max(np.abs(sample_covariance(x) - sigma)) <= 0.02

    def test_sample_size_validated(self):
        with pytest.raises(InputError):
            sample_mvn(np.eye(2), 0, seed=1)
