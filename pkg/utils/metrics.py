"""
Regression evaluation metrics

Metrics:
- Mean absolute error
- Mean squared error
- Mean absolute percentage error (percent, divided by the true value)
- Accuracy, defined here as 100 - MAPE
"""
from dataclasses import asdict, dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
from sklearn.metrics import mean_absolute_error, mean_absolute_percentage_error, mean_squared_error

from utils.errors import MetricsError


@dataclass(frozen=True)
class MetricsReport:
    mae: float
    mse: float
    mape: float
    accuracy: float
    n: int

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def _paired(true: Sequence[float], pred: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    y_true = np.asarray(true, dtype=float).ravel()
    y_pred = np.asarray(pred, dtype=float).ravel()
    if y_true.size != y_pred.size:
        raise MetricsError(f"{y_true.size} true values but {y_pred.size} predictions")
    if y_true.size == 0:
        raise MetricsError("metrics need at least one sample")
    return y_true, y_pred


def mae(true: Sequence[float], pred: Sequence[float]) -> float:
    y_true, y_pred = _paired(true, pred)
    return float(mean_absolute_error(y_true, y_pred))


def mse(true: Sequence[float], pred: Sequence[float]) -> float:
    y_true, y_pred = _paired(true, pred)
    return float(mean_squared_error(y_true, y_pred))


def mape(true: Sequence[float], pred: Sequence[float]) -> float:
    y_true, y_pred = _paired(true, pred)
    # sklearn clamps the denominator at machine epsilon instead of failing
    if np.any(y_true == 0):
        raise MetricsError("zero true value in MAPE")
    return 100.0 * float(mean_absolute_percentage_error(y_true, y_pred))


def report(true: Sequence[float], pred: Sequence[float]) -> MetricsReport:
    """All three indicators plus accuracy = 100 - MAPE"""
    percentage_error = mape(true, pred)
    return MetricsReport(
        mae=mae(true, pred),
        mse=mse(true, pred),
        mape=percentage_error,
        accuracy=100.0 - percentage_error,
        n=int(np.size(true)),
    )
