import numpy as np
import pytest

from rules import bfa
from rules.benchmarks import BENCHMARKS, OPTIMA, absolute, get_benchmark, rastrigin, sphere
from rules.bfa import Bacterium, BfaConfig
from utils.errors import ConfigError, DimensionError, NonFiniteFitnessError
from utils.numerics import RandomStream


class CountingFitness:
    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return self.fn(x)


class TestBfaConfig:
    def test_defaults(self):
        cfg = BfaConfig()
        assert (cfg.population_size, cfg.chemotaxis_steps, cfg.reproduction_steps) == (20, 25, 4)
        assert (cfg.elimination_steps, cfg.swim_length) == (2, 4)
        assert cfg.step_size == 0.1 and cfg.dispersal_probability == 0.25

    @pytest.mark.parametrize(
        "field, value",
        [
            ("population_size", 3),
            ("population_size", 0),
            ("chemotaxis_steps", 0),
            ("reproduction_steps", 0),
            ("elimination_steps", 0),
            ("swim_length", -1),
            ("step_size", 0.0),
            ("dispersal_probability", 1.5),
            ("dim", 0),
        ],
    )
    def test_invalid(self, field, value):
        with pytest.raises(ConfigError, match=field):
            BfaConfig(**{field: value})


class TestTumbleDirection:
    def test_forced_draw(self):
        direction = bfa.tumble_direction([0.5, 0.5], RandomStream(1), x_rand=[0.3, 0.5])
        np.testing.assert_allclose(direction, [-1.0, 0.0])

    def test_one_dimension(self):
        np.testing.assert_allclose(bfa.tumble_direction([0.8], RandomStream(1), x_rand=[0.2]), [-1.0])

    def test_unit_norm(self):
        stream = RandomStream(3)
        for _ in range(50):
            direction = bfa.tumble_direction(stream.random(6), stream)
            assert np.linalg.norm(direction) == pytest.approx(1.0, abs=1e-12)

    def test_points_at_drawn_position(self):
        position = np.array([0.9, 0.1, 0.6])
        x_rand = np.array([0.2, 0.7, 0.6])
        direction = bfa.tumble_direction(position, RandomStream(1), x_rand=x_rand)
        assert np.dot(direction, x_rand - position) == pytest.approx(np.linalg.norm(x_rand - position))

    def test_forced_draw_on_position(self):
        with pytest.raises(DimensionError):
            bfa.tumble_direction([0.4], RandomStream(1), x_rand=[0.4])


class TestChemotaxisMove:
    def test_forced_step(self):
        cfg = BfaConfig(step_size=0.1, swim_length=0, dim=2)
        b = Bacterium([0.5, 0.5], 1.0)
        moved = bfa.chemotaxis_move(b, sphere, cfg, RandomStream(1), step_scale=0.5, direction=[1.0, 0.0])
        np.testing.assert_allclose(moved.position, [0.55, 0.5])
        assert moved.fitness == pytest.approx(sphere(moved.position))

    def test_clamped_at_boundary(self):
        cfg = BfaConfig(dim=1)
        moved = bfa.chemotaxis_move(Bacterium([1.0], 0.0), sphere, cfg, RandomStream(2), direction=[1.0])
        np.testing.assert_array_equal(moved.position, [1.0])

    def test_constant_fitness_moves_once(self):
        fitness = CountingFitness(lambda x: 3.0)
        cfg = BfaConfig(swim_length=4, dim=3)
        moved = bfa.chemotaxis_move(Bacterium([0.5, 0.5, 0.5], 3.0), fitness, cfg, RandomStream(5))
        assert fitness.calls == 1
        assert moved.health == 3.0

    def test_swims_while_improving(self):
        fitness = CountingFitness(sphere)
        cfg = BfaConfig(step_size=0.1, swim_length=3, dim=1)
        start = Bacterium([0.0], sphere([0.0]))
        moved = bfa.chemotaxis_move(start, fitness, cfg, RandomStream(1), step_scale=1.0, direction=[1.0])
        # 0.1, 0.2, 0.3, 0.4 all improve on the previous position; the cap stops at three swims
        assert fitness.calls == 4
        np.testing.assert_allclose(moved.position, [0.4])

    def test_worse_swim_is_discarded(self):
        fitness = CountingFitness(lambda x: abs(float(x[0]) - 0.12))
        cfg = BfaConfig(step_size=0.1, swim_length=4, dim=1)
        moved = bfa.chemotaxis_move(Bacterium([0.0], 0.12), fitness, cfg, RandomStream(1), step_scale=1.0, direction=[1.0])
        assert fitness.calls == 2
        np.testing.assert_allclose(moved.position, [0.1])
        assert moved.fitness == pytest.approx(0.02)
        assert moved.health == pytest.approx(0.02 + 0.08)

    def test_fitness_matches_final_position(self):
        cfg = BfaConfig(step_size=0.3, swim_length=4, dim=3)
        stream = RandomStream(21)
        b = Bacterium(stream.random(3), 1.0)
        for i in range(40):
            b = bfa.chemotaxis_move(b, rastrigin, cfg, stream.child(i))
            assert b.fitness == rastrigin(b.position)

    def test_position_stays_in_box(self):
        cfg = BfaConfig(step_size=0.5, dim=4)
        stream = RandomStream(8)
        b = Bacterium(stream.random(4), 1.0)
        for i in range(30):
            b = bfa.chemotaxis_move(b, sphere, cfg, stream.child(i))
            assert np.all((b.position >= 0.0) & (b.position <= 1.0))

    def test_non_finite_fitness_carries_position(self):
        cfg = BfaConfig(dim=1)
        with pytest.raises(NonFiniteFitnessError) as info:
            bfa.chemotaxis_move(Bacterium([0.5], 1.0), lambda x: float("nan"), cfg, RandomStream(1),
                                step_scale=1.0, direction=[1.0])
        assert info.value.position == pytest.approx((0.6,))


class TestReproduce:
    def test_best_survives(self):
        population = [Bacterium([0.1], 1.0, health=1.0), Bacterium([0.9], 9.0, health=9.0)]
        offspring = bfa.reproduce(population)
        assert [b.position[0] for b in offspring] == [0.1, 0.1]
        assert all(b.health == 0.0 for b in offspring)

    def test_sorted_by_health(self):
        population = [Bacterium([p], 0.0, health=h) for p, h in [(0.1, 3), (0.2, 1), (0.3, 4), (0.4, 2)]]
        positions = [b.position[0] for b in bfa.reproduce(population)]
        assert positions == [0.2, 0.4, 0.2, 0.4]

    def test_ties_keep_index_order(self):
        population = [Bacterium([p], 0.0, health=1.0) for p in (0.1, 0.2, 0.3, 0.4)]
        positions = [b.position[0] for b in bfa.reproduce(population)]
        assert positions == [0.1, 0.2, 0.1, 0.2]

    def test_odd_population(self):
        with pytest.raises(DimensionError):
            bfa.reproduce([Bacterium([0.1], 0.0)] * 3)


class TestEliminateDisperse:
    def test_zero_probability(self):
        cfg = BfaConfig(dispersal_probability=0.0, dim=2)
        population = [Bacterium([0.1, 0.2], 1.0), Bacterium([0.3, 0.4], 2.0)]
        result = bfa.eliminate_disperse(population, cfg, RandomStream(1), sphere)
        assert all(a is b for a, b in zip(result, population))

    def test_certain_dispersal(self):
        cfg = BfaConfig(dispersal_probability=1.0, population_size=6, dim=3)
        population = [Bacterium([0.5, 0.5, 0.5], 0.0, health=2.0) for _ in range(6)]
        result = bfa.eliminate_disperse(population, cfg, RandomStream(4), sphere)
        assert all(b is not old for b, old in zip(result, population))
        for b in result:
            assert np.all((b.position >= 0.0) & (b.position < 1.0))
            assert b.fitness == pytest.approx(sphere(b.position))

    def test_mean_dispersed_count(self):
        cfg = BfaConfig(dispersal_probability=0.25, population_size=40, dim=1)
        population = [Bacterium([0.5], 0.0) for _ in range(40)]
        root = RandomStream(12)
        counts = [
            sum(b is not old for b, old in zip(bfa.eliminate_disperse(population, cfg, root.child(trial), sphere), population))
            for trial in range(500)
        ]
        assert 8 <= np.mean(counts) <= 12


class TestOptimize:
    def test_sphere_default_budget(self):
        result = bfa.optimize(sphere, BfaConfig(dim=5), RandomStream(42))
        assert result.best_fitness <= 1e-2

    def test_absolute_one_dimension(self):
        result = bfa.optimize(absolute, BfaConfig(dim=1), RandomStream(3))
        assert abs(result.best_position[0] - 0.25) <= 0.05

    def test_constant_fitness(self, small_bfa):
        result = bfa.optimize(lambda x: 2.5, small_bfa.with_dim(3), RandomStream(1))
        assert result.best_fitness == 2.5
        assert set(result.trace) == {2.5}

    def test_trace_contract(self, small_bfa):
        result = bfa.optimize(rastrigin, small_bfa.with_dim(2), RandomStream(9))
        trace = np.array(result.trace)
        assert np.all(np.diff(trace) <= 0)
        assert trace[-1] == result.best_fitness
        assert result.best_fitness == pytest.approx(rastrigin(result.best_position))
        sweeps = small_bfa.elimination_steps * small_bfa.reproduction_steps * small_bfa.chemotaxis_steps
        assert result.generations == sweeps
        assert len(trace) == sweeps + small_bfa.elimination_steps

    def test_evaluation_count_matches_calls(self, small_bfa):
        fitness = CountingFitness(sphere)
        result = bfa.optimize(fitness, small_bfa.with_dim(2), RandomStream(6))
        assert result.evaluations == fitness.calls

    def test_deterministic(self, small_bfa):
        a = bfa.optimize(sphere, small_bfa.with_dim(3), RandomStream(5))
        b = bfa.optimize(sphere, small_bfa.with_dim(3), RandomStream(5))
        np.testing.assert_array_equal(a.best_position, b.best_position)
        assert a.trace == b.trace

    def test_workers_do_not_change_result(self, small_bfa):
        serial = bfa.optimize(sphere, small_bfa.with_dim(3), RandomStream(5))
        threaded = bfa.optimize(sphere, small_bfa.with_dim(3), RandomStream(5), workers=3)
        np.testing.assert_array_equal(serial.best_position, threaded.best_position)
        assert serial.trace == threaded.trace
        assert serial.evaluations == threaded.evaluations

    def test_fitness_error_propagates(self, small_bfa):
        with pytest.raises(NonFiniteFitnessError):
            bfa.optimize(lambda x: float("inf"), small_bfa, RandomStream(1))

    def test_invalid_workers(self, small_bfa):
        with pytest.raises(ConfigError):
            bfa.optimize(sphere, small_bfa, RandomStream(1), workers=0)


class TestBenchmarks:
    @pytest.mark.parametrize("name", sorted(BENCHMARKS))
    def test_zero_at_optimum(self, name):
        assert get_benchmark(name)(np.full(4, OPTIMA[name])) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("name", sorted(BENCHMARKS))
    def test_positive_elsewhere(self, name):
        assert get_benchmark(name)(np.full(4, 0.9)) > 0.0

    def test_unknown(self):
        with pytest.raises(ConfigError, match="unknown benchmark"):
            get_benchmark("ackley")
