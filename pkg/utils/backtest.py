"""
Paired-seed comparison of the plain ELM against BFA-ELM

For every seed the dataset is split once and both strategies are fitted
and scored on that identical split, so their metrics can be compared seed
by seed. Dominance is judged on the medians over seeds.
"""
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from data.flight_data import Dataset
from rules.bfa_elm_strategy import MODE_BFA_ELM, MODE_ELM, BfaElmStrategy, ElmStrategy, NormStats, PipelineConfig, split
from utils.errors import ConfigError, DegenerateFeatureError
from utils.metrics import MetricsReport
from utils.numerics import RandomStream
from utils.strategy_base import StrategyRunner

logger = logging.getLogger(__name__)

MODELS = (MODE_ELM, MODE_BFA_ELM)
METRIC_COLUMNS = ("MAE", "MSE", "MAPE")

PAIRED_CSV = "comparison.csv"
PLOT_CSV = "plot_data.csv"
SUMMARY_JSON = "summary.json"


@dataclass(frozen=True)
class PairedRow:
    seed_index: int
    seed: int
    metrics: Dict[str, MetricsReport]
    chosen_L: Dict[str, int]
    test_out_of_range_fraction: float
    test_drift: Optional[Dict[str, Dict[str, float]]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed_index": self.seed_index,
            "seed": self.seed,
            "chosen_L": dict(self.chosen_L),
            "metrics": {model: report.to_dict() for model, report in self.metrics.items()},
            "test_out_of_range_fraction": self.test_out_of_range_fraction,
            "test_drift": self.test_drift,
        }


def _max_abs_shift(drift: Optional[Dict[str, Dict[str, float]]]) -> float:
    if drift is None:
        return float("nan")
    return max(abs(shift) for column in drift.values() for shift in column.values())


@dataclass(frozen=True)
class ComparisonReport:
    config: PipelineConfig
    dataset_size: int
    rows: Tuple[PairedRow, ...]

    def medians(self) -> Dict[str, Dict[str, float]]:
        summary = {}
        for model in MODELS:
            reports = [row.metrics[model] for row in self.rows]
            summary[model] = {
                "MAE": float(np.median([r.mae for r in reports])),
                "MSE": float(np.median([r.mse for r in reports])),
                "MAPE": float(np.median([r.mape for r in reports])),
                "accuracy": float(np.median([r.accuracy for r in reports])),
            }
        return summary

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "dataset_size": self.dataset_size,
            "n_seeds": len(self.rows),
            "rows": [row.to_dict() for row in self.rows],
            "medians": self.medians(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def paired_frame(self) -> pd.DataFrame:
        """One row per seed, both models side by side"""
        records = []
        for row in self.rows:
            record = {"seed": row.seed}
            for model in MODELS:
                m = row.metrics[model]
                record.update({f"{model}_MAE": m.mae, f"{model}_MSE": m.mse, f"{model}_MAPE": m.mape})
            record["test_out_of_range_fraction"] = row.test_out_of_range_fraction
            record["test_max_abs_drift"] = _max_abs_shift(row.test_drift)
            records.append(record)
        return pd.DataFrame(records)

    def plot_frame(self) -> pd.DataFrame:
        """Flat (seed, model, MAE, MSE, MAPE) rows"""
        records = [
            {"seed": row.seed, "model": model, "MAE": row.metrics[model].mae,
             "MSE": row.metrics[model].mse, "MAPE": row.metrics[model].mape}
            for row in self.rows
            for model in MODELS
        ]
        return pd.DataFrame(records, columns=["seed", "model", *METRIC_COLUMNS])

    def write(self, out_dir: Union[str, Path]) -> Dict[str, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = {name: out_dir / name for name in (PAIRED_CSV, PLOT_CSV, SUMMARY_JSON)}
        self.paired_frame().to_csv(paths[PAIRED_CSV], index=False, lineterminator="\n")
        self.plot_frame().to_csv(paths[PLOT_CSV], index=False, lineterminator="\n")
        paths[SUMMARY_JSON].write_text(self.to_json(), encoding="utf-8")
        return paths


def _test_drift(stats: NormStats, test: Dataset) -> Optional[Dict[str, Dict[str, float]]]:
    """Training-vs-test min/max shift; None when a test column is constant"""
    try:
        return stats.drift(NormStats.from_training(test.features(), test.targets()))
    except DegenerateFeatureError as e:
        logger.debug("no drift report for this split: %s", e)
        return None


class ModelBacktester:
    """
    Backtest both model strategies over independent seeds
    """

    def __init__(self, config: PipelineConfig):
        self.config = config

    def seed_for(self, seed_index: int) -> int:
        return RandomStream(self.config.seed).child("compare", seed_index).spawn_seed()

    def run_seed(self, dataset: Dataset, seed_index: int) -> PairedRow:
        seed = self.seed_for(seed_index)
        seed_config = replace(self.config, seed=seed, workers=1)
        train, test = split(dataset, seed_config.train_ratio, RandomStream(seed).child("split"))

        runner = StrategyRunner()
        runner.register_strategy(ElmStrategy(seed_config))
        runner.register_strategy(BfaElmStrategy(seed_config))
        outcomes = runner.run_multiple_strategies(list(MODELS), train, test)

        stats = outcomes[MODE_BFA_ELM].report.norm_stats
        row = PairedRow(
            seed_index=seed_index,
            seed=seed,
            metrics={model: outcomes[model].metrics for model in MODELS},
            chosen_L={model: outcomes[model].report.chosen_L for model in MODELS},
            test_out_of_range_fraction=stats.out_of_range_fraction(test.features(), test.targets()),
            test_drift=_test_drift(stats, test),
        )
        logger.info(
            "seed %d: ELM MSE %.6g (L=%d), BFA-ELM MSE %.6g (L=%d)",
            seed_index, row.metrics[MODE_ELM].mse, row.chosen_L[MODE_ELM],
            row.metrics[MODE_BFA_ELM].mse, row.chosen_L[MODE_BFA_ELM],
        )
        return row

    def compare_strategies(self, dataset: Dataset, n_seeds: int, workers: int = 1) -> ComparisonReport:
        if n_seeds < 1:
            raise ConfigError(f"n_seeds must be >= 1, got {n_seeds}")
        if workers < 1:
            raise ConfigError(f"workers must be >= 1, got {workers}")
        dataset.require(2, "a train/test split")

        if workers == 1:
            rows: List[PairedRow] = [self.run_seed(dataset, i) for i in range(n_seeds)]
        else:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                rows = list(executor.map(lambda i: self.run_seed(dataset, i), range(n_seeds)))
        return ComparisonReport(self.config, len(dataset), tuple(rows))

    def print_summary(self, report: ComparisonReport) -> None:
        print("\n" + "=" * 60)
        print(f"ELM vs BFA-ELM over {len(report.rows)} seed(s), {report.dataset_size} records")
        print("=" * 60)
        for model, medians in report.medians().items():
            print(f"\n{model}:")
            print(f"  Median MAE: {medians['MAE']:.6f}")
            print(f"  Median MSE: {medians['MSE']:.6f}")
            print(f"  Median MAPE: {medians['MAPE']:.3f}%")
            print(f"  Median accuracy: {medians['accuracy']:.3f}%")


def compare_models(dataset: Dataset, cfg: PipelineConfig, n_seeds: int, workers: Optional[int] = None) -> ComparisonReport:
    """Paired comparison over n_seeds; workers defaults to cfg.workers"""
    return ModelBacktester(cfg).compare_strategies(dataset, n_seeds, cfg.workers if workers is None else workers)
