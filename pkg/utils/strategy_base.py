"""
Base strategy class shared by the plain ELM and BFA-ELM fitters
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, List

import numpy as np

from utils import metrics
from utils.errors import ConfigError

if TYPE_CHECKING:
    from data.flight_data import Dataset
    from rules.bfa_elm_strategy import FitReport, PipelineConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StrategyOutcome:
    """Fit report of one strategy and its metrics on a test split"""

    name: str
    report: "FitReport"
    predictions: np.ndarray
    metrics: metrics.MetricsReport


class BaseFitStrategy(ABC):
    """Base class for all model-fitting strategies"""

    name = "base"

    def __init__(self, config: "PipelineConfig"):
        self.config = config

    @abstractmethod
    def fit(self, train: "Dataset") -> "FitReport":
        """Fit on a training split"""

    def predict(self, report: "FitReport", dataset: "Dataset") -> np.ndarray:
        return report.predict(dataset)

    def evaluate(self, report: "FitReport", test: "Dataset") -> StrategyOutcome:
        """Denormalized predictions on test and their MAE, MSE and MAPE"""
        test.require(1, "evaluation")
        predictions = self.predict(report, test)
        return StrategyOutcome(self.name, report, predictions, metrics.report(test.targets(), predictions))


class StrategyRunner:
    """Fits and scores registered strategies on the same split"""

    def __init__(self):
        self.strategies: Dict[str, BaseFitStrategy] = {}

    def register_strategy(self, strategy: BaseFitStrategy) -> None:
        self.strategies[strategy.name] = strategy

    def run_strategy(self, strategy_name: str, train: "Dataset", test: "Dataset") -> StrategyOutcome:
        if strategy_name not in self.strategies:
            raise ConfigError(f"strategy '{strategy_name}' not registered (have {', '.join(self.strategies)})")
        strategy = self.strategies[strategy_name]
        report = strategy.fit(train)
        outcome = strategy.evaluate(report, test)
        logger.info("%s: L=%d MAE=%.6g MSE=%.6g MAPE=%.4g%%", strategy_name, report.chosen_L,
                    outcome.metrics.mae, outcome.metrics.mse, outcome.metrics.mape)
        return outcome

    def run_multiple_strategies(self, strategy_names: List[str], train: "Dataset", test: "Dataset") -> Dict[str, StrategyOutcome]:
        return {name: self.run_strategy(name, train, test) for name in strategy_names}

    def run_all(self, train: "Dataset", test: "Dataset") -> Dict[str, StrategyOutcome]:
        return self.run_multiple_strategies(list(self.strategies), train, test)

    def print_outcomes(self, outcomes: Dict[str, StrategyOutcome], title: str = "Model comparison") -> None:
        print(f"\n{'=' * 60}")
        print(title.upper())
        print("=" * 60)
        for i, (name, outcome) in enumerate(outcomes.items(), 1):
            m = outcome.metrics
            print(f"\n{i}. {name}")
            print(f"   Hidden nodes: {outcome.report.chosen_L}")
            print(f"   MAE:  {m.mae:.6f}")
            print(f"   MSE:  {m.mse:.6f}")
            print(f"   MAPE: {m.mape:.3f}%")
            print(f"   Accuracy: {m.accuracy:.3f}%")
            print("-" * 40)
