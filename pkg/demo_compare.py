#!/usr/bin/env python3
"""
Comparison Demo - ELM vs BFA-ELM

This script walks through the model comparison on a small synthetic
flight dataset, with a reduced optimizer budget so it finishes quickly.
"""

import logging
from dataclasses import replace

from data.flight_data import correlation_screen, generate_synthetic
from rules.bfa_elm_strategy import BfaElmStrategy, ElmStrategy, split
from utils.backtest import ModelBacktester
from utils.config_manager import DEFAULT_CONFIG_PATH, ConfigManager
from utils.errors import BfaElmError
from utils.numerics import RandomStream
from utils.strategy_base import StrategyRunner


def demo_comparison():
    """Demonstrate dataset screening, a single paired fit and a multi-seed comparison"""

    logging.basicConfig(level=logging.WARNING)
    shipped = ConfigManager(DEFAULT_CONFIG_PATH).build_pipeline_config()
    config = replace(
        shipped,
        l_candidates=(5, 10),
        bfa=replace(shipped.bfa, population_size=10, chemotaxis_steps=10, reproduction_steps=2, elimination_steps=1),
    )
    dataset = generate_synthetic(120, 0.02, RandomStream(config.seed).child("generate"))

    print("🎯 ELM vs BFA-ELM COMPARISON DEMO")
    print("=" * 60)

    print("\n1. Correlation screen of the synthetic dataset...")
    print("-" * 40)
    for name, r in correlation_screen(dataset):
        print(f"  {name}: r = {r:+.3f}")

    print("\n2. Fitting both models on one split...")
    print("-" * 40)
    try:
        train, test = split(dataset, config.train_ratio, RandomStream(config.seed).child("split"))
        runner = StrategyRunner()
        runner.register_strategy(ElmStrategy(config))
        runner.register_strategy(BfaElmStrategy(config))
        runner.print_outcomes(runner.run_all(train, test), "Single split")
    except BfaElmError as e:
        print(f"❌ Error in single split: {e}")

    print("\n3. Paired comparison over 5 seeds...")
    print("-" * 40)
    try:
        backtester = ModelBacktester(config)
        backtester.print_summary(backtester.compare_strategies(dataset, 5))
    except BfaElmError as e:
        print(f"❌ Error in comparison: {e}")

    print("\n📋 Full-size experiment from the command line:")
    print("  python main.py compare --seeds 20 --seed 42 --out comparison")


if __name__ == "__main__":
    demo_comparison()
