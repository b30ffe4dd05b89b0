import numpy as np
import pytest

from utils import metrics
from utils.errors import MetricsError


class TestMae:
    def test_perfect(self):
        assert metrics.mae([0.3, 0.7], [0.3, 0.7]) == 0.0

    def test_single(self):
        assert metrics.mae([2.0], [1.0]) == 1.0

    def test_table_values(self):
        assert metrics.mae([0.571, 0.549], [0.5, 0.5]) == pytest.approx(0.06)

    def test_length_mismatch(self):
        with pytest.raises(MetricsError):
            metrics.mae([1.0, 2.0], [1.0])

    def test_empty(self):
        with pytest.raises(MetricsError):
            metrics.mae([], [])


class TestMse:
    def test_single(self):
        assert metrics.mse([2.0], [1.0]) == 1.0

    def test_hand_value(self):
        assert metrics.mse([1.0, 1.0], [0.9, 1.3]) == pytest.approx(0.05)


class TestMape:
    def test_half_off(self):
        assert metrics.mape([2.0], [1.0]) == 50.0

    def test_hand_value(self):
        assert metrics.mape([0.5, 0.25], [0.45, 0.30]) == pytest.approx(15.0)

    def test_zero_true_value(self):
        with pytest.raises(MetricsError, match="zero true value in MAPE"):
            metrics.mape([0.0, 1.0], [0.1, 1.0])


class TestReport:
    def test_perfect(self):
        report = metrics.report([0.2, 0.4], [0.2, 0.4])
        assert (report.mae, report.mse, report.mape, report.accuracy) == (0.0, 0.0, 0.0, 100.0)

    def test_composed(self):
        report = metrics.report([2.0], [1.0])
        assert (report.mae, report.mse, report.mape, report.accuracy, report.n) == (1.0, 1.0, 50.0, 50.0, 1)

    def test_mae_bounded_by_root_mse(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            true = rng.uniform(0.1, 1.0, size=rng.integers(1, 30))
            pred = true + rng.normal(0.0, 0.2, size=true.size)
            report = metrics.report(true, pred)
            assert report.mae <= np.sqrt(report.mse) + 1e-15

    def test_to_dict(self):
        assert set(metrics.report([1.0], [1.0]).to_dict()) == {"mae", "mse", "mape", "accuracy", "n"}


class TestProperties:
    def test_mae_and_mse_are_symmetric(self):
        rng = np.random.default_rng(3)
        true, pred = rng.uniform(0.1, 1.0, 25), rng.uniform(0.1, 1.0, 25)
        assert metrics.mae(true, pred) == pytest.approx(metrics.mae(pred, true), abs=1e-15)
        assert metrics.mse(true, pred) == pytest.approx(metrics.mse(pred, true), abs=1e-15)

    def test_mape_is_not_symmetric(self):
        assert metrics.mape([2.0], [1.0]) == 50.0
        assert metrics.mape([1.0], [2.0]) == 100.0

    def test_joint_shuffle_leaves_metrics_unchanged(self):
        rng = np.random.default_rng(4)
        true = rng.uniform(0.1, 1.0, 40)
        pred = true + rng.normal(0.0, 0.05, 40)
        order = rng.permutation(40)
        before = metrics.report(true, pred)
        after = metrics.report(true[order], pred[order])
        assert after.mae == pytest.approx(before.mae, rel=1e-12)
        assert after.mse == pytest.approx(before.mse, rel=1e-12)
        assert after.mape == pytest.approx(before.mape, rel=1e-12)

    def test_zero_only_for_exact_predictions(self):
        true = np.array([0.3, 0.6, 0.9])
        pred = true.copy()
        pred[1] += 1e-9
        report = metrics.report(true, pred)
        assert report.mae > 0 and report.mse > 0 and report.mape > 0

    def test_matches_direct_formulas(self):
        rng = np.random.default_rng(5)
        true = rng.uniform(0.1, 1.0, 30)
        pred = rng.uniform(0.1, 1.0, 30)
        residual = true - pred
        assert metrics.mae(true, pred) == pytest.approx(np.abs(residual).mean(), abs=1e-12)
        assert metrics.mse(true, pred) == pytest.approx((residual ** 2).mean(), abs=1e-12)
        assert metrics.mape(true, pred) == pytest.approx(100.0 * np.mean(np.abs(residual) / true), abs=1e-12)

    def test_mae_bounded_by_root_mse_on_random_pairs(self):
        rng = np.random.default_rng(6)
        for _ in range(1000):
            size = int(rng.integers(1, 20))
            true, pred = rng.normal(size=size), rng.normal(size=size)
            assert metrics.mae(true, pred) <= np.sqrt(metrics.mse(true, pred)) + 1e-12
