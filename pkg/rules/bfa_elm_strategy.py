"""
BFA-ELM flight performance model.

Couples the bacterial foraging optimizer with the ELM: every bacterium
position in [0, 1]^(L*n + L) decodes to hidden-layer weights and offsets,
its fitness is the validation MSE of the ELM whose output weights are then
solved analytically, and the hidden-node count L is swept over a fixed
candidate list. A plain ELM (random hidden layer, same L selection) is the
baseline it is compared against.

Features and target are min-max normalized with statistics of the training
split only; predictions are mapped back to target units.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from data.flight_data import FEATURE_NAMES, Dataset
from rules import elm
from rules.bfa import BfaConfig, BfaResult, optimize
from utils.errors import ConfigError, DatasetError, DegenerateFeatureError, DimensionError
from utils.numerics import Activation, RandomStream, as_matrix, least_squares_solve
from utils.strategy_base import BaseFitStrategy

logger = logging.getLogger(__name__)

DEFAULT_L_CANDIDATES = (5, 10, 15, 20)
DEFAULT_SEED = 42

MODE_ELM = "elm"
MODE_BFA_ELM = "bfa-elm"


def normalize(x, min_value, max_value):
    """(x - min) / (max - min); values outside the training range are not clamped"""
    lo = np.asarray(min_value, dtype=float)
    hi = np.asarray(max_value, dtype=float)
    if np.any(hi <= lo):
        raise DegenerateFeatureError("degenerate feature (min must be below max)")
    result = (np.asarray(x, dtype=float) - lo) / (hi - lo)
    return float(result) if result.ndim == 0 else result


def denormalize(x_norm, min_value, max_value):
    lo = np.asarray(min_value, dtype=float)
    hi = np.asarray(max_value, dtype=float)
    if np.any(hi <= lo):
        raise DegenerateFeatureError("degenerate feature (min must be below max)")
    result = np.asarray(x_norm, dtype=float) * (hi - lo) + lo
    return float(result) if result.ndim == 0 else result


@dataclass(frozen=True, eq=False)
class NormStats:
    """
    Per-feature and target min/max of a training split.

    A constant target is allowed: its scale is taken as 1 so normalization
    reduces to a shift. A constant feature is an error.
    """

    feature_min: np.ndarray
    feature_max: np.ndarray
    target_min: float
    target_max: float
    feature_names: Tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        for name in ("feature_min", "feature_max"):
            values = np.array(getattr(self, name), dtype=float).ravel()
            values.setflags(write=False)
            object.__setattr__(self, name, values)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if not self.feature_min.size == self.feature_max.size == len(self.feature_names):
            raise DimensionError("feature_min, feature_max and feature_names must have equal lengths")
        for name, lo, hi in zip(self.feature_names, self.feature_min, self.feature_max):
            if not lo < hi:
                raise DegenerateFeatureError(f"degenerate feature {name}: min = max = {lo!r}", column=name)
        if self.target_min > self.target_max:
            raise DimensionError("target_min must not exceed target_max")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NormStats):
            return NotImplemented
        return (
            np.array_equal(self.feature_min, other.feature_min)
            and np.array_equal(self.feature_max, other.feature_max)
            and self.target_min == other.target_min
            and self.target_max == other.target_max
            and self.feature_names == other.feature_names
        )

    @classmethod
    def from_training(cls, X, t, feature_names: Sequence[str] = FEATURE_NAMES) -> "NormStats":
        X = as_matrix(X, "X")
        t = np.asarray(t, dtype=float).ravel()
        return cls(X.min(axis=0), X.max(axis=0), float(t.min()), float(t.max()), tuple(feature_names))

    @property
    def target_span(self) -> float:
        span = self.target_max - self.target_min
        return span if span > 0 else 1.0

    def transform_features(self, X) -> np.ndarray:
        return normalize(as_matrix(X, "X"), self.feature_min, self.feature_max)

    def transform_target(self, t) -> np.ndarray:
        return (np.asarray(t, dtype=float) - self.target_min) / self.target_span

    def inverse_target(self, t_norm) -> np.ndarray:
        return np.asarray(t_norm, dtype=float) * self.target_span + self.target_min

    def out_of_range_fraction(self, X, t) -> float:
        """Share of normalized values (features and target) falling outside [0, 1]"""
        values = np.concatenate([self.transform_features(X).ravel(), np.ravel(self.transform_target(t))])
        return float(np.mean((values < 0.0) | (values > 1.0)))

    def drift(self, other: "NormStats") -> Dict[str, Dict[str, float]]:
        """Per-column min/max shift of other (for example test-split statistics) against these"""
        report = {}
        for i, name in enumerate(self.feature_names):
            report[name] = {
                "min_shift": float(other.feature_min[i] - self.feature_min[i]),
                "max_shift": float(other.feature_max[i] - self.feature_max[i]),
            }
        report["FPI"] = {
            "min_shift": float(other.target_min - self.target_min),
            "max_shift": float(other.target_max - self.target_max),
        }
        return report

    def to_dict(self) -> Dict[str, Any]:
        return {
            "feature_names": list(self.feature_names),
            "feature_min": [float(v) for v in self.feature_min],
            "feature_max": [float(v) for v in self.feature_max],
            "target_min": float(self.target_min),
            "target_max": float(self.target_max),
        }

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> "NormStats":
        return cls(
            document["feature_min"],
            document["feature_max"],
            float(document["target_min"]),
            float(document["target_max"]),
            tuple(document.get("feature_names", FEATURE_NAMES)),
        )


@dataclass(frozen=True)
class PipelineConfig:
    l_candidates: Tuple[int, ...] = DEFAULT_L_CANDIDATES
    activation: Activation = Activation.SIGMOID
    train_ratio: float = 0.75
    validation_ratio: float = 0.2
    bfa: BfaConfig = field(default_factory=BfaConfig)
    seed: int = DEFAULT_SEED
    workers: int = 1

    def __post_init__(self):
        try:
            candidates = tuple(int(L) for L in self.l_candidates)
        except (TypeError, ValueError):
            raise ConfigError(f"l_candidates must be a list of integers, got {self.l_candidates!r}") from None
        if not candidates or min(candidates) < 1:
            raise ConfigError(f"l_candidates must be non-empty and all >= 1, got {list(candidates)}")
        object.__setattr__(self, "l_candidates", candidates)
        object.__setattr__(self, "activation", Activation.parse(self.activation))
        if not 0.0 < self.train_ratio < 1.0:
            raise ConfigError(f"train_ratio must lie in (0, 1), got {self.train_ratio}")
        if not 0.0 <= self.validation_ratio < 1.0:
            raise ConfigError(f"validation_ratio must lie in [0, 1), got {self.validation_ratio}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "l_candidates": list(self.l_candidates),
            "activation": self.activation.value,
            "train_ratio": self.train_ratio,
            "validation_ratio": self.validation_ratio,
            "bfa": self.bfa.to_dict(),
            "seed": self.seed,
        }


@dataclass(frozen=True)
class CandidateSummary:
    L: int
    best_fitness: float
    evaluations: int


@dataclass(frozen=True, eq=False)
class FitReport:
    """
    Outcome of fitting one strategy on a training split.

    best_fitness is the validation MSE in normalized target units;
    best_fitness_target_units rescales it by the squared target span.
    """

    mode: str
    chosen_L: int
    best_fitness: float
    bfa_trace: Tuple[float, ...]
    norm_stats: NormStats
    model: elm.ElmModel
    best_position: np.ndarray
    candidates: Tuple[CandidateSummary, ...]
    validation_size: int
    config: PipelineConfig

    @property
    def best_fitness_target_units(self) -> float:
        return self.best_fitness * self.norm_stats.target_span ** 2

    def predict(self, dataset: Dataset) -> np.ndarray:
        """Predicted FPI, in target units, for every record"""
        normalized = self.model.predict_many(self.norm_stats.transform_features(dataset.features()))
        return self.norm_stats.inverse_target(normalized)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "config": self.config.to_dict(),
            "chosen_L": self.chosen_L,
            "best_fitness": self.best_fitness,
            "best_fitness_target_units": self.best_fitness_target_units,
            "bfa_trace": list(self.bfa_trace),
            "candidates": [
                {"L": c.L, "best_fitness": c.best_fitness, "evaluations": c.evaluations} for c in self.candidates
            ],
            "validation_size": self.validation_size,
            "norm_stats": self.norm_stats.to_dict(),
        }


@dataclass(frozen=True, eq=False)
class PreparedData:
    """Normalized training split and the holdout used by the fitness function"""

    norm_stats: NormStats
    X: np.ndarray
    t: np.ndarray
    fit_X: np.ndarray
    fit_t: np.ndarray
    val_X: np.ndarray
    val_t: np.ndarray
    has_holdout: bool


def split_indices(n: int, ratio: float, stream: RandomStream) -> Tuple[np.ndarray, np.ndarray]:
    """Random partition of range(n) into round(ratio * n) and the rest, each sorted"""
    first = int(math.floor(ratio * n + 0.5))
    if n < 2 or not 1 <= first <= n - 1:
        raise DatasetError(f"cannot split {n} records with ratio {ratio}: both parts must be non-empty")
    order = stream.permutation(n)
    return np.sort(order[:first]), np.sort(order[first:])


def split(dataset: Dataset, train_ratio: float, stream: RandomStream) -> Tuple[Dataset, Dataset]:
    """(train, test) partition without replacement; deterministic per stream"""
    train_idx, test_idx = split_indices(len(dataset), train_ratio, stream)
    return dataset.subset(train_idx), dataset.subset(test_idx)


def decode_position(position: Sequence[float], n: int, L: int, activation: Union[str, Activation]) -> elm.ElmParams:
    """First L*n components are the input weights row by row, the last L the offsets; w = 2p - 1"""
    position = np.asarray(position, dtype=float).ravel()
    if position.size != L * n + L:
        raise DimensionError(f"position has {position.size} components, expected L*n + L = {L * n + L}")
    values = 2.0 * position - 1.0
    return elm.ElmParams(values[: L * n].reshape(L, n), values[L * n:], activation)


def encode_params(params: elm.ElmParams) -> np.ndarray:
    """Inverse of decode_position"""
    return (np.concatenate([params.input_weights.ravel(), params.offsets]) + 1.0) / 2.0


def _holdout_mse(params: elm.ElmParams, train_X, train_t, val_X, val_t) -> float:
    beta = least_squares_solve(elm.hidden_matrix(params, train_X), np.asarray(train_t, dtype=float).ravel())
    residual = elm.hidden_matrix(params, val_X) @ beta - np.asarray(val_t, dtype=float).ravel()
    return float(np.mean(residual ** 2))


def fitness_of_position(position, train_X, train_t, val_X, val_t, n: int, L: int, activation) -> float:
    """Validation MSE of the ELM decoded from position, output weights solved on the training part"""
    if np.size(val_t) == 0:
        raise DatasetError("fitness needs a non-empty validation set")
    return _holdout_mse(decode_position(position, n, L, activation), train_X, train_t, val_X, val_t)


def prepare_training(train_set: Dataset, cfg: PipelineConfig) -> PreparedData:
    """
    Normalize with training statistics and carve out the validation holdout.

    Without room for a holdout (validation_ratio 0 or too few records) the
    fitness falls back to training MSE.
    """
    train_set.require(1, "training")
    X = train_set.features()
    t = train_set.targets()
    stats = NormStats.from_training(X, t)
    Xn = stats.transform_features(X)
    tn = stats.transform_target(t)

    k = len(train_set)
    n_val = int(math.floor(cfg.validation_ratio * k + 0.5))
    if n_val < 1 or k - n_val < 1:
        logger.info("no room for a validation holdout in %d records; fitness uses training MSE", k)
        return PreparedData(stats, Xn, tn, Xn, tn, Xn, tn, False)
    fit_idx, val_idx = split_indices(k, 1.0 - n_val / k, RandomStream(cfg.seed).child("validation"))
    return PreparedData(stats, Xn, tn, Xn[fit_idx], tn[fit_idx], Xn[val_idx], tn[val_idx], True)


def _pick_candidate(scored: List[Tuple[float, int, Any]]) -> Tuple[float, int, Any]:
    # lowest fitness wins, ties go to the smaller L
    return min(scored, key=lambda entry: (entry[0], entry[1]))


def fit_bfa_elm(train_set: Dataset, cfg: PipelineConfig) -> FitReport:
    """Run the optimizer for every L candidate and refit the winner on the whole training split"""
    data = prepare_training(train_set, cfg)
    root = RandomStream(cfg.seed)
    n = data.X.shape[1]

    scored: List[Tuple[float, int, BfaResult]] = []
    for L in cfg.l_candidates:
        fitness = partial(
            fitness_of_position,
            train_X=data.fit_X, train_t=data.fit_t, val_X=data.val_X, val_t=data.val_t,
            n=n, L=L, activation=cfg.activation,
        )
        result = optimize(fitness, cfg.bfa.with_dim(L * n + L), root.child("bfa", L), workers=cfg.workers)
        logger.info("L=%d: best fitness %.6g after %d evaluations", L, result.best_fitness, result.evaluations)
        scored.append((result.best_fitness, L, result))

    best_fitness, chosen_L, result = _pick_candidate(scored)
    params = decode_position(result.best_position, n, chosen_L, cfg.activation)
    model = elm.train(data.X, data.t, chosen_L, cfg.activation, None, params=params)
    logger.info("BFA-ELM chose L=%d with fitness %.6g", chosen_L, best_fitness)
    return FitReport(
        mode=MODE_BFA_ELM,
        chosen_L=chosen_L,
        best_fitness=best_fitness,
        bfa_trace=result.trace,
        norm_stats=data.norm_stats,
        model=model,
        best_position=result.best_position,
        candidates=tuple(CandidateSummary(L, fit, res.evaluations) for fit, L, res in scored),
        validation_size=int(data.val_t.size) if data.has_holdout else 0,
        config=cfg,
    )


def fit_plain_elm(train_set: Dataset, cfg: PipelineConfig) -> FitReport:
    """Baseline: one random hidden layer per L candidate, L chosen by the same validation MSE"""
    data = prepare_training(train_set, cfg)
    root = RandomStream(cfg.seed)
    n = data.X.shape[1]

    scored: List[Tuple[float, int, elm.ElmParams]] = []
    for L in cfg.l_candidates:
        params = elm.init_params(n, L, cfg.activation, root.child("elm", L))
        scored.append((_holdout_mse(params, data.fit_X, data.fit_t, data.val_X, data.val_t), L, params))

    best_fitness, chosen_L, params = _pick_candidate(scored)
    model = elm.train(data.X, data.t, chosen_L, cfg.activation, None, params=params)
    logger.info("ELM chose L=%d with fitness %.6g", chosen_L, best_fitness)
    return FitReport(
        mode=MODE_ELM,
        chosen_L=chosen_L,
        best_fitness=best_fitness,
        bfa_trace=(),
        norm_stats=data.norm_stats,
        model=model,
        best_position=encode_params(params),
        candidates=tuple(CandidateSummary(L, fit, 1) for fit, L, _ in scored),
        validation_size=int(data.val_t.size) if data.has_holdout else 0,
        config=cfg,
    )


def save_trained_model(report: FitReport, path) -> None:
    """Model JSON with the normalization statistics needed to score raw data"""
    elm.save_model(report.model, path, extra={"norm_stats": report.norm_stats.to_dict(), "mode": report.mode})


def load_trained_model(path) -> Tuple[elm.ElmModel, Optional[NormStats]]:
    document = elm.read_model_document(path)
    model = elm.ElmModel.from_dict(document)
    stats = NormStats.from_dict(document["norm_stats"]) if document.get("norm_stats") else None
    return model, stats


def predict_dataset(model: elm.ElmModel, stats: Optional[NormStats], dataset: Dataset) -> np.ndarray:
    """Predicted FPI for every record; without stats the model is applied to raw values"""
    X = dataset.features()
    if model.params.n != X.shape[1]:
        raise DimensionError(f"model expects {model.params.n} features but the data has {X.shape[1]}")
    if stats is not None and stats.feature_min.size != X.shape[1]:
        raise DimensionError(f"normalization covers {stats.feature_min.size} features but the data has {X.shape[1]}")
    if stats is None:
        return model.predict_many(X)
    return stats.inverse_target(model.predict_many(stats.transform_features(X)))


class ElmStrategy(BaseFitStrategy):
    """Plain ELM with randomly drawn hidden layers"""

    name = MODE_ELM

    def fit(self, train: Dataset) -> FitReport:
        return fit_plain_elm(train, self.config)


class BfaElmStrategy(BaseFitStrategy):
    """ELM whose hidden layer is searched by bacterial foraging"""

    name = MODE_BFA_ELM

    def fit(self, train: Dataset) -> FitReport:
        return fit_bfa_elm(train, self.config)
