"""
Bacterial Foraging Algorithm on the unit box [0, 1]^d.

Minimizes a caller-supplied fitness function with three nested phases:
chemotaxis (tumble, move and swim), reproduction of the healthiest half,
and elimination-dispersal of random bacteria to fresh positions.

Loop nesting is elimination (l) > reproduction (k) > chemotaxis (j). The
chemotaxis move of bacterium i in sweep (l, k, j) draws from its own child
stream, so a run gives the same result for any number of workers.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from utils.errors import ConfigError, DimensionError, NonFiniteFitnessError
from utils.numerics import RandomStream

logger = logging.getLogger(__name__)

FitnessFn = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class BfaConfig:
    """
    Algorithm parameters.

    population_size (S) must be even so reproduction can split the best
    half. swim_length (N_s) caps the extra same-direction moves taken while
    fitness keeps improving.
    """

    population_size: int = 20
    chemotaxis_steps: int = 25
    reproduction_steps: int = 4
    elimination_steps: int = 2
    swim_length: int = 4
    step_size: float = 0.1
    dispersal_probability: float = 0.25
    dim: int = 1

    def __post_init__(self):
        if self.population_size < 2 or self.population_size % 2:
            raise ConfigError(f"population_size must be even and >= 2, got {self.population_size}")
        for name in ("chemotaxis_steps", "reproduction_steps", "elimination_steps", "dim"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.swim_length < 0:
            raise ConfigError(f"swim_length must be >= 0, got {self.swim_length}")
        if not (self.step_size > 0 and math.isfinite(self.step_size)):
            raise ConfigError(f"step_size must be a positive number, got {self.step_size}")
        if not 0.0 <= self.dispersal_probability <= 1.0:
            raise ConfigError(f"dispersal_probability must lie in [0, 1], got {self.dispersal_probability}")

    def with_dim(self, dim: int) -> "BfaConfig":
        return replace(self, dim=dim)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class Bacterium:
    """A candidate solution; health accumulates fitness over the current chemotaxis loop"""

    position: np.ndarray
    fitness: float
    health: float = 0.0

    def __post_init__(self):
        position = np.array(self.position, dtype=float).ravel()
        position.setflags(write=False)
        object.__setattr__(self, "position", position)


@dataclass(frozen=True, eq=False)
class BfaResult:
    best_position: np.ndarray
    best_fitness: float
    trace: Tuple[float, ...]
    evaluations: int
    generations: int


class _Evaluator:
    """Wraps a fitness function, counting calls and remembering the best position seen"""

    def __init__(self, fitness_fn: FitnessFn):
        self.fitness_fn = fitness_fn
        self.count = 0
        self.best_fitness = math.inf
        self.best_position: Optional[np.ndarray] = None

    def __call__(self, position: np.ndarray) -> float:
        value = self.fitness_fn(position)
        self.count += 1
        if value < self.best_fitness:
            self.best_fitness = value
            self.best_position = np.array(position, dtype=float)
        return value

    def merge(self, other: "_Evaluator") -> None:
        self.count += other.count
        if other.best_fitness < self.best_fitness:
            self.best_fitness = other.best_fitness
            self.best_position = other.best_position


def _evaluate(fitness_fn: FitnessFn, position: np.ndarray) -> float:
    frozen = np.array(position, dtype=float)
    frozen.setflags(write=False)
    value = float(fitness_fn(frozen))
    if not math.isfinite(value):
        raise NonFiniteFitnessError(value, frozen)
    return value


def tumble_direction(
    position: Sequence[float],
    stream: RandomStream,
    x_rand: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """
    Unit vector (X_rand - position) / ||X_rand - position||, pointing at X_rand.

    X_rand is drawn uniformly in [0, 1]^d and redrawn while it coincides
    with position. Passing x_rand fixes the draw.
    """
    position = np.asarray(position, dtype=float).ravel()
    while True:
        if x_rand is None:
            candidate = stream.random(position.size)
        else:
            candidate = np.asarray(x_rand, dtype=float).ravel()
            if candidate.size != position.size:
                raise DimensionError(f"x_rand has {candidate.size} components, position has {position.size}")
        delta = candidate - position
        norm = float(np.linalg.norm(delta))
        if norm > 0.0:
            return delta / norm
        if x_rand is not None:
            raise DimensionError("x_rand coincides with position; the direction is undefined")


def chemotaxis_move(
    b: Bacterium,
    fitness_fn: FitnessFn,
    cfg: BfaConfig,
    stream: RandomStream,
    step_scale: Optional[float] = None,
    direction: Optional[Sequence[float]] = None,
) -> Bacterium:
    """
    Tumble, move by R * step_size * phi, then swim.

    The first move is always taken. Further moves repeat the same
    displacement while the fitness strictly improves, at most swim_length
    times; a swim that does not improve is discarded and the bacterium
    stays where it was. Every evaluated fitness is added to the
    bacterium's health. step_scale and direction fix R and phi.
    """
    if direction is None:
        phi = tumble_direction(b.position, stream)
    else:
        phi = np.asarray(direction, dtype=float).ravel()
    scale = stream.random() if step_scale is None else float(step_scale)
    displacement = scale * cfg.step_size * phi

    position = np.clip(b.position + displacement, 0.0, 1.0)
    fitness = _evaluate(fitness_fn, position)
    health = b.health + fitness
    improving = fitness < b.fitness
    swims = 0
    while improving and swims < cfg.swim_length:
        candidate = np.clip(position + displacement, 0.0, 1.0)
        candidate_fitness = _evaluate(fitness_fn, candidate)
        health += candidate_fitness
        swims += 1
        improving = candidate_fitness < fitness
        if improving:
            position, fitness = candidate, candidate_fitness
    return Bacterium(position, fitness, health)


def reproduce(population: Sequence[Bacterium]) -> List[Bacterium]:
    """
    Keep the healthiest half (lowest accumulated fitness) and split each survivor in two.

    Ties are broken by original index. Survivors come first, then their
    copies in the same order; every health is reset to zero.
    """
    size = len(population)
    if size == 0 or size % 2:
        raise DimensionError(f"reproduction needs a non-empty even population, got {size}")
    ranked = sorted(range(size), key=lambda i: (population[i].health, i))
    survivors = [replace(population[i], health=0.0) for i in ranked[: size // 2]]
    return survivors + [replace(b) for b in survivors]


def eliminate_disperse(
    population: Sequence[Bacterium],
    cfg: BfaConfig,
    stream: RandomStream,
    fitness_fn: FitnessFn,
) -> List[Bacterium]:
    """With probability dispersal_probability each bacterium moves to a fresh uniform position"""
    draws = stream.random(len(population))
    dispersed = []
    for bacterium, draw in zip(population, draws):
        if draw < cfg.dispersal_probability:
            position = stream.random(cfg.dim)
            bacterium = Bacterium(position, _evaluate(fitness_fn, position), 0.0)
        dispersed.append(bacterium)
    return dispersed


def _chemotaxis_sweep(
    population: List[Bacterium],
    fitness_fn: FitnessFn,
    cfg: BfaConfig,
    stream: RandomStream,
    indices: Tuple[int, int, int],
    executor: Optional[ThreadPoolExecutor],
) -> Tuple[List[Bacterium], List[_Evaluator]]:
    def move(i: int) -> Tuple[Bacterium, _Evaluator]:
        local = _Evaluator(fitness_fn)
        moved = chemotaxis_move(population[i], local, cfg, stream.child("chemotaxis", *indices, i))
        return moved, local

    if executor is None:
        outcomes = [move(i) for i in range(len(population))]
    else:
        outcomes = list(executor.map(move, range(len(population))))
    return [moved for moved, _ in outcomes], [local for _, local in outcomes]


def optimize(fitness_fn: FitnessFn, cfg: BfaConfig, stream: RandomStream, workers: int = 1) -> BfaResult:
    """
    Run the full elimination > reproduction > chemotaxis schedule.

    The trace holds the best fitness seen so far after every chemotaxis
    sweep and after every elimination-dispersal event, so its last entry is
    the minimum over every evaluated position.
    """
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    run = _Evaluator(fitness_fn)

    init_stream = stream.child("init")
    population = []
    for _ in range(cfg.population_size):
        position = init_stream.random(cfg.dim)
        population.append(Bacterium(position, _evaluate(run, position)))

    trace: List[float] = []
    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for elimination in range(cfg.elimination_steps):
            for reproduction in range(cfg.reproduction_steps):
                for step in range(cfg.chemotaxis_steps):
                    population, locals_ = _chemotaxis_sweep(population, fitness_fn, cfg, stream, (elimination, reproduction, step), executor)
                    for local in locals_:
                        run.merge(local)
                    trace.append(run.best_fitness)
                population = reproduce(population)
                logger.debug("elimination %d reproduction %d: best %.6g", elimination, reproduction, run.best_fitness)
            population = eliminate_disperse(population, cfg, stream.child("disperse", elimination), run)
            trace.append(run.best_fitness)
    finally:
        if executor is not None:
            executor.shutdown()

    logger.debug("BFA finished: best %.6g after %d evaluations", run.best_fitness, run.count)
    best_position = np.array(run.best_position, dtype=float)
    best_position.setflags(write=False)
    return BfaResult(
        best_position=best_position,
        best_fitness=run.best_fitness,
        trace=tuple(trace),
        evaluations=run.count,
        generations=cfg.elimination_steps * cfg.reproduction_steps * cfg.chemotaxis_steps,
    )
