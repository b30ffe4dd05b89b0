"""
Extreme Learning Machine regression.

A single hidden layer whose input weights a_i and offsets b_i are drawn at
random (or supplied), and whose output weights beta are the least-squares
solution over the hidden-layer output matrix H. Scalar targets only.
"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from utils.errors import DataFileError, DimensionError, NonFiniteError, SchemaError
from utils.numerics import Activation, RandomStream, apply_activation, as_matrix, least_squares_solve

logger = logging.getLogger(__name__)

WEIGHT_RANGE = (-1.0, 1.0)


def _frozen_vector(values: Sequence[float], name: str) -> np.ndarray:
    vector = np.array(values, dtype=float).ravel()
    if not np.all(np.isfinite(vector)):
        raise NonFiniteError(f"{name} contains NaN or infinite entries")
    vector.setflags(write=False)
    return vector


@dataclass(frozen=True, eq=False)
class ElmParams:
    """Hidden layer: input_weights is L x n (row i is a_i), offsets has L entries (b_i)"""

    input_weights: np.ndarray
    offsets: np.ndarray
    activation: Activation = Activation.SIGMOID

    def __post_init__(self):
        weights = as_matrix(self.input_weights, "input_weights")
        offsets = _frozen_vector(self.offsets, "offsets")
        if offsets.size != weights.shape[0]:
            raise DimensionError(
                f"{weights.shape[0]} hidden nodes in input_weights but {offsets.size} offsets"
            )
        object.__setattr__(self, "input_weights", weights)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "activation", Activation.parse(self.activation))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ElmParams):
            return NotImplemented
        return (
            self.activation == other.activation
            and np.array_equal(self.input_weights, other.input_weights)
            and np.array_equal(self.offsets, other.offsets)
        )

    @property
    def L(self) -> int:
        return self.input_weights.shape[0]

    @property
    def n(self) -> int:
        return self.input_weights.shape[1]


@dataclass(frozen=True, eq=False)
class ElmModel:
    """Trained network; output_weights holds beta_i for each hidden node"""

    params: ElmParams
    output_weights: np.ndarray

    def __post_init__(self):
        beta = _frozen_vector(self.output_weights, "output_weights")
        if beta.size != self.params.L:
            raise DimensionError(f"model has {self.params.L} hidden nodes but {beta.size} output weights")
        object.__setattr__(self, "output_weights", beta)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ElmModel):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.output_weights, other.output_weights)

    def predict_many(self, X) -> np.ndarray:
        """Predictions for every row of X"""
        return hidden_matrix(self.params, X) @ self.output_weights

    def to_dict(self) -> Dict[str, Any]:
        # floats go through repr, which round-trips float64 bit-exactly
        return {
            "n": self.params.n,
            "L": self.params.L,
            "activation": self.params.activation.value,
            "input_weights": [float(v) for v in self.params.input_weights.ravel()],
            "offsets": [float(v) for v in self.params.offsets],
            "output_weights": [float(v) for v in self.output_weights],
        }

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> "ElmModel":
        try:
            n = int(document["n"])
            L = int(document["L"])
            weights = np.array(document["input_weights"], dtype=float)
            if weights.size != L * n:
                raise DimensionError(f"input_weights has {weights.size} values, expected L*n = {L * n}")
            params = ElmParams(weights.reshape(L, n), document["offsets"], document["activation"])
            return cls(params, document["output_weights"])
        except KeyError as e:
            raise SchemaError(f"model document is missing field {e.args[0]!r}") from None


def init_params(n: int, L: int, activation: Union[str, Activation], stream: RandomStream) -> ElmParams:
    """Draw every a_i component and every b_i uniformly from [-1, 1]"""
    if n < 1 or L < 1:
        raise DimensionError(f"need n >= 1 and L >= 1, got n={n}, L={L}")
    lo, hi = WEIGHT_RANGE
    weights = stream.uniform(lo, hi, size=(L, n))
    offsets = stream.uniform(lo, hi, size=L)
    return ElmParams(weights, offsets, activation)


def hidden_matrix(params: ElmParams, X) -> np.ndarray:
    """H with entry (j, i) = f(a_i . x_j + b_i)"""
    X = as_matrix(X, "X")
    if X.shape[1] != params.n:
        raise DimensionError(f"X has {X.shape[1]} columns but the hidden layer expects {params.n}")
    return apply_activation(params.activation, X @ params.input_weights.T + params.offsets)


def train(
    X,
    t: Sequence[float],
    L: int,
    activation: Union[str, Activation],
    stream: Optional[RandomStream],
    params: Optional[ElmParams] = None,
) -> ElmModel:
    """
    Fit an ELM.

    When params is given the random initialisation is skipped and those
    hidden-layer parameters are used as they are.
    """
    X = as_matrix(X, "X")
    targets = _frozen_vector(t, "t")
    if targets.size != X.shape[0]:
        raise DimensionError(f"X has {X.shape[0]} rows but t has {targets.size} values")
    if params is None:
        if stream is None:
            raise DimensionError("train needs a random stream when params are not given")
        params = init_params(X.shape[1], L, activation, stream)
    elif params.n != X.shape[1]:
        raise DimensionError(f"params expect {params.n} inputs but X has {X.shape[1]} columns")

    beta = least_squares_solve(hidden_matrix(params, X), targets)
    logger.debug("trained ELM with L=%d on %d samples", params.L, X.shape[0])
    return ElmModel(params, beta)


def predict(model: ElmModel, x: Sequence[float]) -> float:
    """sum_i beta_i f(a_i . x + b_i) for a single input vector"""
    row = np.asarray(x, dtype=float).ravel()
    if row.size != model.params.n:
        raise DimensionError(f"x has {row.size} values but the model expects {model.params.n}")
    return float(model.predict_many(row.reshape(1, -1))[0])


def loss(model: ElmModel, X, t: Sequence[float]) -> float:
    """Sum of squared errors over the samples (not the mean)"""
    targets = np.asarray(t, dtype=float).ravel()
    predictions = model.predict_many(X)
    if predictions.size != targets.size:
        raise DimensionError(f"X has {predictions.size} rows but t has {targets.size} values")
    residuals = predictions - targets
    return float(residuals @ residuals)


def save_model(model: ElmModel, path: Union[str, Path], extra: Optional[Dict[str, Any]] = None) -> None:
    """Write the model JSON; extra top-level fields are merged in"""
    document = model.to_dict()
    if extra:
        document.update(extra)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as file:
        json.dump(document, file, indent=2, sort_keys=True)
        file.write("\n")


def read_model_document(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as file:
            return json.load(file)
    except FileNotFoundError:
        raise DataFileError(f"model file not found: {path}") from None
    except UnicodeDecodeError as e:
        raise SchemaError(f"{path} is not valid UTF-8 ({e.reason})") from None
    except OSError as e:
        raise DataFileError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path} is not valid JSON: {e.msg}", line=e.lineno) from None


def load_model(path: Union[str, Path]) -> ElmModel:
    return ElmModel.from_dict(read_model_document(path))
