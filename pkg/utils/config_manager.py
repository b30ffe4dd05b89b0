"""
Configuration manager to centralize all configuration handling

Settings come from three layers: built-in defaults, an optional YAML (or
JSON) file, and command-line overrides, later layers winning.
"""
import copy
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from rules.bfa import BfaConfig
from rules.bfa_elm_strategy import DEFAULT_SEED, PipelineConfig
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "configs" / "bfa_elm_config.yaml"


def _default_config() -> Dict[str, Any]:
    return {
        "seed": DEFAULT_SEED,
        "pipeline": {
            "l_candidates": [5, 10, 15, 20],
            "activation": "sigmoid",
            "train_ratio": 0.75,
            "validation_ratio": 0.2,
        },
        "bfa": {
            "population_size": 20,
            "chemotaxis_steps": 25,
            "reproduction_steps": 4,
            "elimination_steps": 2,
            "swim_length": 4,
            "step_size": 0.1,
            "dispersal_probability": 0.25,
        },
        "generate": {"n": 200, "noise_sd": 0.02},
        "compare": {"n_seeds": 20, "workers": 1},
    }


def _merge(base: Dict[str, Any], override: Dict[str, Any], where: str = "") -> Dict[str, Any]:
    """Deep merge that rejects keys absent from base"""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        path = f"{where}.{key}" if where else str(key)
        if key not in base:
            raise ConfigError(f"unknown config key '{path}'")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config section '{path}' must be a mapping")
            merged[key] = _merge(base[key], value, path)
        else:
            merged[key] = value
    return merged


@dataclass(frozen=True)
class RunConfig:
    """Everything one command needs, validated up front"""

    seed: int
    pipeline: PipelineConfig
    generate_n: int = 200
    noise_sd: float = 0.02
    n_seeds: int = 20
    workers: int = 1
    source: Optional[Path] = field(default=None, compare=False)

    def __post_init__(self):
        if self.generate_n < 1:
            raise ConfigError("n must be ≥ 1")
        if not self.noise_sd >= 0:
            raise ConfigError(f"noise_sd must be ≥ 0, got {self.noise_sd}")
        if self.n_seeds < 1:
            raise ConfigError(f"n_seeds must be ≥ 1, got {self.n_seeds}")
        if self.workers < 1:
            raise ConfigError(f"workers must be ≥ 1, got {self.workers}")


class ConfigManager:
    """Centralized configuration management"""

    def __init__(self, config_path: Optional[Union[str, Path]] = None):
        self.config_path = Path(config_path) if config_path else None
        self.config: Optional[Dict[str, Any]] = None

    def load_config(self) -> Dict[str, Any]:
        """Defaults merged with the config file, loaded once"""
        if self.config is None:
            self.config = _default_config()
            if self.config_path is not None:
                self.config = _merge(self.config, self._read_file(self.config_path))
        return self.config

    @staticmethod
    def _read_file(path: Path) -> Dict[str, Any]:
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as file:
                document = yaml.safe_load(file)
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot parse config file {path}: {e}".replace("\n", " ")) from None
        if document is None:
            return {}
        if not isinstance(document, dict):
            raise ConfigError(f"config file {path} must contain a mapping")
        logger.info("loaded config from %s", path)
        return document

    def get_setting(self, section: str, setting_name: Optional[str] = None, default_value: Any = None) -> Any:
        config = self.load_config()
        if setting_name is None:
            return config.get(section, default_value)
        return config.get(section, {}).get(setting_name, default_value)

    def override(self, section: str, setting_name: Optional[str], value: Any) -> None:
        """Apply a command-line flag; None means the flag was not given"""
        if value is None:
            return
        config = self.load_config()
        if setting_name is None:
            config[section] = value
        else:
            config[section][setting_name] = value

    def build_bfa_config(self) -> BfaConfig:
        try:
            return BfaConfig(**self.get_setting("bfa"))
        except TypeError as e:
            raise ConfigError(f"invalid bfa section: {e}") from None

    def build_pipeline_config(self) -> PipelineConfig:
        pipeline = self.get_setting("pipeline")
        try:
            return PipelineConfig(
                l_candidates=pipeline["l_candidates"],
                activation=pipeline["activation"],
                train_ratio=float(pipeline["train_ratio"]),
                validation_ratio=float(pipeline["validation_ratio"]),
                bfa=self.build_bfa_config(),
                seed=self.get_setting("seed"),
                workers=int(self.get_setting("compare", "workers")),
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"invalid pipeline section: {e}") from None

    def build_run_config(self) -> RunConfig:
        try:
            return RunConfig(
                seed=self.get_setting("seed"),
                pipeline=self.build_pipeline_config(),
                generate_n=int(self.get_setting("generate", "n")),
                noise_sd=float(self.get_setting("generate", "noise_sd")),
                n_seeds=int(self.get_setting("compare", "n_seeds")),
                workers=int(self.get_setting("compare", "workers")),
                source=self.config_path,
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"invalid config value: {e}") from None

    def save_config(self, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as file:
            yaml.safe_dump(self.load_config(), file, default_flow_style=False, sort_keys=False)

