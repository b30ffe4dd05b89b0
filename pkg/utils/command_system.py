"""
Command system: argparse subcommands dispatched through a single table

Subcommands: generate | train | evaluate | compare | fpi | correlate | benchmark.
Data goes to files or stdout, diagnostics to stderr. Exit status is 0 on
success, 1 on a data or runtime error and 2 on a configuration or usage error.

Configuration precedence: command-line flags > --config file > built-in defaults.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from data import flight_data
from rules import bfa_elm_strategy as pipeline
from rules.bfa import optimize
from rules.benchmarks import BENCHMARKS, get_benchmark
from utils import metrics
from utils.backtest import ModelBacktester
from utils.config_manager import ConfigManager, RunConfig
from utils.errors import BfaElmError, ConfigError
from utils.numerics import Activation, RandomStream

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

PREDICTIONS_CSV = "predictions.csv"
# settings of a compare run after flags are applied; replayable with --config
RESOLVED_CONFIG_YAML = "config.yaml"


def _write_json(document, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _parse_candidates(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got '{text}'") from None
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {value}")
    return value


class CommandSystem:
    """Centralized command table with shared option handling"""

    def __init__(self):
        self.config_manager: Optional[ConfigManager] = None
        self.commands: Dict[str, Tuple[str, Callable[[argparse.Namespace, RunConfig], int]]] = {
            "generate": ("Write a synthetic dataset CSV", self.cmd_generate),
            "train": ("Fit BFA-ELM (or a plain ELM) and write the model and its report", self.cmd_train),
            "evaluate": ("Score a saved model on a dataset and write predictions.csv", self.cmd_evaluate),
            "compare": ("Paired-seed comparison of plain ELM and BFA-ELM", self.cmd_compare),
            "fpi": ("Flight performance index of an altitude trace", self.cmd_fpi),
            "correlate": ("Pearson correlation of each feature with FPI", self.cmd_correlate),
            "benchmark": ("Run the optimizer on a benchmark objective", self.cmd_benchmark),
        }

    def build_parser(self) -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--seed", type=_seed, default=None, help="root seed (overrides the config file)")
        common.add_argument("--config", type=Path, default=None, help="YAML or JSON config file")
        common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")

        parser = argparse.ArgumentParser(
            prog="bfa-elm",
            description="Flight performance prediction with ELM and bacterial foraging.",
            epilog="Precedence: command-line flags > --config file > built-in defaults.",
        )
        subparsers = parser.add_subparsers(dest="command", required=True)
        parsers = {
            name: subparsers.add_parser(name, help=description, parents=[common])
            for name, (description, _) in self.commands.items()
        }

        p = parsers["generate"]
        p.add_argument("--n", type=int, default=None, help="number of records (default 200)")
        p.add_argument("--noise", type=float, default=None, help="noise standard deviation (default 0.02)")
        p.add_argument("--out", type=Path, required=True, help="dataset CSV to write")

        p = parsers["train"]
        p.add_argument("--data", type=Path, required=True, help="dataset CSV")
        p.add_argument("--mode", choices=[pipeline.MODE_BFA_ELM, pipeline.MODE_ELM], default=pipeline.MODE_BFA_ELM)
        p.add_argument("--out", type=Path, default=Path("model.json"), help="model JSON to write")
        p.add_argument("--report", type=Path, default=None, help="report JSON (default <out stem>.report.json)")
        self._add_pipeline_flags(p)

        p = parsers["evaluate"]
        p.add_argument("--model", type=Path, required=True, help="model JSON written by train")
        p.add_argument("--data", type=Path, required=True, help="dataset CSV")
        p.add_argument("--out", type=Path, default=Path(PREDICTIONS_CSV), help="predictions CSV to write")

        p = parsers["compare"]
        p.add_argument("--data", type=Path, default=None, help="dataset CSV (default: synthetic data from the seed)")
        p.add_argument("--seeds", type=int, default=None, help="number of paired seeds (default 20)")
        p.add_argument("--workers", type=int, default=None, help="threads for seeds")
        p.add_argument("--out", type=Path, default=Path("comparison"), help="output directory")
        self._add_pipeline_flags(p)

        p = parsers["fpi"]
        p.add_argument("--trace", type=Path, required=True, help="CSV with header h_ac,h_ex")

        p = parsers["correlate"]
        p.add_argument("--data", type=Path, required=True, help="dataset CSV")

        p = parsers["benchmark"]
        p.add_argument("--function", choices=sorted(BENCHMARKS), default="sphere")
        p.add_argument("--dim", type=int, default=5)
        p.add_argument("--out", type=Path, default=None, help="result JSON (default: stdout only)")
        return parser

    @staticmethod
    def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--l-candidates", type=_parse_candidates, default=None, help="e.g. 5,10,15,20")
        p.add_argument("--activation", choices=[a.value for a in Activation], default=None)

    def resolve_config(self, args: argparse.Namespace) -> RunConfig:
        manager = ConfigManager(args.config)
        manager.override("seed", None, args.seed)
        manager.override("generate", "n", getattr(args, "n", None))
        manager.override("generate", "noise_sd", getattr(args, "noise", None))
        manager.override("compare", "n_seeds", getattr(args, "seeds", None))
        manager.override("compare", "workers", getattr(args, "workers", None))
        manager.override("pipeline", "l_candidates", getattr(args, "l_candidates", None))
        manager.override("pipeline", "activation", getattr(args, "activation", None))
        run = manager.build_run_config()
        self.config_manager = manager
        return run

    def handle_command(self, args: argparse.Namespace) -> int:
        _, handler = self.commands[args.command]
        try:
            run_config = self.resolve_config(args)
            return handler(args, run_config)
        except ConfigError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        except (BfaElmError, OSError) as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_FAILURE

    def cmd_generate(self, args: argparse.Namespace, run: RunConfig) -> int:
        dataset = flight_data.generate_synthetic(run.generate_n, run.noise_sd, RandomStream(run.seed).child("generate"))
        flight_data.save_csv(dataset, args.out)
        print(f"wrote {len(dataset)} records to {args.out}")
        return EXIT_OK

    def cmd_train(self, args: argparse.Namespace, run: RunConfig) -> int:
        dataset = flight_data.load_csv(args.data)
        if args.mode == pipeline.MODE_ELM:
            report = pipeline.fit_plain_elm(dataset, run.pipeline)
        else:
            report = pipeline.fit_bfa_elm(dataset, run.pipeline)
        report_path = args.report or args.out.with_name(f"{args.out.stem}.report.json")
        pipeline.save_trained_model(report, args.out)
        _write_json(report.to_dict(), report_path)
        print(f"chosen_L: {report.chosen_L}")
        print(f"best_fitness: {report.best_fitness!r}")
        return EXIT_OK

    def cmd_evaluate(self, args: argparse.Namespace, run: RunConfig) -> int:
        model, stats = pipeline.load_trained_model(args.model)
        dataset = flight_data.load_csv(args.data)
        dataset.require(1, "evaluation")
        predicted = pipeline.predict_dataset(model, stats, dataset)
        result = metrics.report(dataset.targets(), predicted)

        frame = pd.DataFrame({"index": range(len(dataset)), "true": dataset.targets(), "predicted": predicted})
        args.out.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(args.out, index=False, lineterminator="\n")
        print(json.dumps(result.to_dict(), sort_keys=True))
        return EXIT_OK

    def cmd_compare(self, args: argparse.Namespace, run: RunConfig) -> int:
        if args.data is not None:
            dataset = flight_data.load_csv(args.data)
        else:
            dataset = flight_data.generate_synthetic(
                run.generate_n, run.noise_sd, RandomStream(run.seed).child("generate")
            )
        backtester = ModelBacktester(run.pipeline)
        report = backtester.compare_strategies(dataset, run.n_seeds, run.workers)
        paths = report.write(args.out)
        paths[RESOLVED_CONFIG_YAML] = Path(args.out) / RESOLVED_CONFIG_YAML
        self.config_manager.save_config(paths[RESOLVED_CONFIG_YAML])
        print(json.dumps(report.medians(), sort_keys=True, indent=2))
        logger.info("wrote %s", ", ".join(str(path) for path in paths.values()))
        return EXIT_OK

    def cmd_fpi(self, args: argparse.Namespace, run: RunConfig) -> int:
        trace = flight_data.load_trace_csv(args.trace)
        print(format(flight_data.compute_fpi(trace), ".12g"))
        return EXIT_OK

    def cmd_correlate(self, args: argparse.Namespace, run: RunConfig) -> int:
        dataset = flight_data.load_csv(args.data)
        screen = flight_data.correlation_screen(dataset)
        print(json.dumps([[name, r] for name, r in screen]))
        return EXIT_OK

    def cmd_benchmark(self, args: argparse.Namespace, run: RunConfig) -> int:
        objective = get_benchmark(args.function)
        if args.dim < 1:
            raise ConfigError(f"dim must be >= 1, got {args.dim}")
        cfg = run.pipeline.bfa.with_dim(args.dim)
        result = optimize(objective, cfg, RandomStream(run.seed).child("benchmark"), workers=run.workers)
        document = {
            "function": args.function,
            "dim": args.dim,
            "best_fitness": result.best_fitness,
            "best_position": [float(p) for p in result.best_position],
            "evaluations": result.evaluations,
            "generations": result.generations,
            "trace": list(result.trace),
        }
        if args.out is not None:
            _write_json(document, args.out)
        print(json.dumps({k: document[k] for k in ("function", "dim", "best_fitness", "evaluations")}, sort_keys=True))
        return EXIT_OK


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def run_main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run the command and return its exit status"""
    command_system = CommandSystem()
    parser = command_system.build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    configure_logging(args.verbose)
    return command_system.handle_command(args)


if __name__ == "__main__":
    sys.exit(run_main())
