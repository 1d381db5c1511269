import itertools
import random

import pytest

from gaqueens.core import fitness, pairwise_attack_count, validate_permutation
from gaqueens.engine import (
    ConfigError,
    CountingEvaluator,
    GAConfig,
    Termination,
    check_termination,
    evolve_generation,
    init_population,
    init_repository,
    repository_infusion_pair,
    repository_infusion_single,
    repository_size,
    run,
)
from gaqueens.engine import _compete
from gaqueens.operators import OperatorParams

NO_VARIATION = OperatorParams(0.0, 0.0, 0.0)


def exhaustive_min_excess(n):
    """Lowest score over all boards, computed from the pairwise oracle's diagonal counts."""
    return min(pairwise_attack_count(p).excess_queens()
               for p in itertools.permutations(range(1, n + 1)))


def scored(*fits, n=4):
    """Population stand-in with distinct boards and the given scores."""
    perms = list(itertools.permutations(range(1, n + 1)))
    return [(perms[k], f) for k, f in enumerate(fits)]


def test_init_population_valid_and_sorted():
    pop = init_population(GAConfig(n=4, population_size=10), random.Random(0))
    assert len(pop) == 10
    for genes, f in pop:
        assert validate_permutation(genes)
        assert f == fitness(genes)
    assert [f for _, f in pop] == sorted(f for _, f in pop)


def test_init_population_single_column():
    pop = init_population(GAConfig(n=1, population_size=5), random.Random(0))
    assert pop == [((1,), 0)] * 5


def test_init_population_deterministic():
    config = GAConfig(n=8)
    assert init_population(config, random.Random(17)) == init_population(config, random.Random(17))
    assert init_population(config, random.Random(17)) != init_population(config, random.Random(18))


def test_init_population_shuffle_is_uniform():
    pop = init_population(GAConfig(n=3, population_size=60_000), random.Random(2))
    counts = {}
    for genes, _ in pop:
        counts[genes] = counts.get(genes, 0) + 1
    assert len(counts) == 6
    for c in counts.values():
        assert abs(c - 10_000) < 400


@pytest.mark.parametrize("n, size", [(1, 1), (3, 1), (4, 2), (8, 2), (50, 7), (100, 10)])
def test_repository_size(n, size):
    assert repository_size(n) == size


def test_repository_takes_worst_members():
    pop = scored(0, 1, 2, 3, 9, 9)
    repo = init_repository(GAConfig(n=4, population_size=6), pop)
    assert repo == (pop[4][0], pop[5][0])


def test_repository_size_50():
    config = GAConfig(n=50, population_size=30)
    pop = init_population(config, random.Random(1))
    repo = init_repository(config, pop)
    assert len(repo) == 7
    assert [fitness(g) for g in repo] == [f for _, f in pop[-7:]]


def test_repository_larger_than_population():
    with pytest.raises(ConfigError):
        init_repository(GAConfig(n=100, population_size=20), scored(1, 2, 3))
    with pytest.raises(ConfigError):
        GAConfig(n=100, population_size=9).validate()


def test_infusion_pair_worse_offspring_leaves_population():
    rng = random.Random(0)
    # every offspring scores at least 1 on four columns except the two solutions
    pop = [((2, 4, 1, 3), 0), ((3, 1, 4, 2), 0)]
    repo = ((1, 2, 3, 4), (4, 3, 2, 1))
    for _ in range(50):
        assert repository_infusion_pair(repo, pop, NO_VARIATION, rng) == pop


def test_infusion_pair_better_offspring_replaces_worst():
    repo = ((2, 4, 1, 3), (2, 4, 1, 3))
    pop = [((1, 3, 2, 4), 3), ((1, 2, 3, 4), 5)]
    out = repository_infusion_pair(repo, pop, NO_VARIATION, random.Random(0))
    # both children are the repository board itself and each displaces the current worst
    assert out == [((2, 4, 1, 3), 0), ((2, 4, 1, 3), 0)]
    assert pop == [((1, 3, 2, 4), 3), ((1, 2, 3, 4), 5)]  # input untouched


def test_infusion_pair_noop_for_tiny_repository():
    config = GAConfig(n=3, population_size=6)
    pop = init_population(config, random.Random(0))
    repo = init_repository(config, pop)
    assert len(repo) == 1
    rng = random.Random(4)
    state = rng.getstate()
    assert repository_infusion_pair(repo, pop, OperatorParams(), rng) == pop
    assert rng.getstate() == state


def test_infusion_single_tie_does_not_replace():
    # crossing a board with itself reproduces it; the tie leaves the population as it was
    pop = [((4, 3, 2, 1), 3), ((4, 3, 2, 1), 3)]
    out = repository_infusion_single(((4, 3, 2, 1),), pop, NO_VARIATION, random.Random(1))
    assert out == pop


def test_competition_rule():
    pop = [((2, 4, 1, 3), 0), ((4, 3, 2, 1), 3)]
    tied = list(pop)
    _compete(tied, (1, 2, 3, 4), 3)
    assert tied == pop
    better = list(pop)
    _compete(better, (1, 3, 2, 4), 2)
    assert better == [((2, 4, 1, 3), 0), ((1, 3, 2, 4), 2)]
    front = [((1, 2, 3, 4), 3), ((4, 3, 2, 1), 3)]
    _compete(front, (2, 4, 1, 3), 0)
    assert front == [((2, 4, 1, 3), 0), ((1, 2, 3, 4), 3)]


def test_infusion_single_solution_enters():
    solution = (2, 4, 1, 3)
    pop = [(solution, 0), ((1, 2, 3, 4), 3)]
    for seed in range(20):
        out = repository_infusion_single((solution,), pop, NO_VARIATION, random.Random(seed))
        if out != pop:
            assert out[0][1] == 0 and out[-1][1] <= 3
    # offspring of the solution with itself is the solution and displaces the worst
    out = repository_infusion_single((solution,), [(solution, 0), (solution, 0)],
                                     NO_VARIATION, random.Random(0))
    assert out == [(solution, 0), (solution, 0)]
    out = repository_infusion_single((solution,), [((1, 2, 3, 4), 3)], NO_VARIATION,
                                     random.Random(0))
    assert out == [(solution, 0)]


def test_infusion_single_deterministic():
    config = GAConfig(n=16, population_size=40)
    pop = init_population(config, random.Random(3))
    repo = init_repository(config, pop)
    a = repository_infusion_single(repo, pop, OperatorParams(), random.Random(8))
    b = repository_infusion_single(repo, pop, OperatorParams(), random.Random(8))
    assert a == b


def test_infusion_keeps_order_and_repository():
    config = GAConfig(n=25, population_size=30)
    rng = random.Random(5)
    pop = init_population(config, rng)
    repo = init_repository(config, pop)
    frozen = tuple(repo)
    for _ in range(200):
        pop = repository_infusion_pair(repo, pop, config.operator_params, rng)
        pop = repository_infusion_single(repo, pop, config.operator_params, rng)
        assert [f for _, f in pop] == sorted(f for _, f in pop)
        assert len(pop) == 30
    assert repo == frozen


def test_evolve_keeps_optimal_population():
    solution = (2, 4, 1, 3)
    config = GAConfig(n=4, population_size=6)
    pop = [(solution, 0)] * 6
    repo = ((1, 2, 3, 4), (4, 3, 2, 1))
    rng = random.Random(0)
    for _ in range(20):
        pop = evolve_generation(pop, repo, config, rng)
        assert pop[0][1] == 0


def test_evolve_without_variation_only_reuses_members():
    config = GAConfig(n=12, population_size=40, operator_params=NO_VARIATION)
    rng = random.Random(2)
    pop = init_population(config, rng)
    repo = init_repository(config, pop)
    original = {g for g, _ in pop}
    seen_offspring = set()

    def tracking(genes):
        seen_offspring.add(tuple(genes))
        return fitness(genes)

    nxt = evolve_generation(pop, repo, config, rng, evaluate=tracking)
    for genes, _ in nxt:
        assert genes in original or genes in seen_offspring
    # without crossover or mutation the generation's children are copies of parents
    children_only = seen_offspring - original
    for genes, _ in nxt:
        if genes not in original:
            assert genes in children_only


def test_evolve_best_never_worsens():
    config = GAConfig(n=14, population_size=30)
    rng = random.Random(9)
    pop = init_population(config, rng)
    repo = init_repository(config, pop)
    best = pop[0][1]
    for _ in range(60):
        pop = evolve_generation(pop, repo, config, rng)
        assert pop[0][1] <= best
        best = pop[0][1]
        assert len(pop) == 30


@pytest.mark.parametrize("trace, generation, kwargs, expected", [
    ([3, 0], 1, {}, Termination.SOLVED),
    ([0], 5000, {"max_generations": 5000}, Termination.SOLVED),
    ([4, 3, 2], 10, {"max_generations": 10}, Termination.GENERATION_BUDGET),
    ([4, 4, 4, 4], 3, {"stagnation_window": 3}, Termination.STAGNATION),
    ([5, 4, 4, 4], 3, {"stagnation_window": 3}, Termination.CONTINUE),
    ([4, 4, 4], 2, {"stagnation_window": 3}, Termination.CONTINUE),
    ([4, 4, 4, 4], 3, {"stagnation_window": None}, Termination.CONTINUE),
    ([4, 4, 4, 4], 3, {"stagnation_window": 3, "max_generations": 3},
     Termination.GENERATION_BUDGET),
])
def test_check_termination(trace, generation, kwargs, expected):
    config = GAConfig(n=8, **kwargs)
    assert check_termination(trace, generation, config) is expected


@pytest.mark.parametrize("kwargs", [
    {"n": 0},
    {"n": 8, "population_size": 1},
    {"n": 8, "elitism_count": 1000},
    {"n": 8, "max_generations": 0},
    {"n": 8, "seed": -1},
    {"n": 8, "seed": 2 ** 64},
    {"n": 8, "stagnation_window": -3},
])
def test_invalid_config(kwargs):
    with pytest.raises(ConfigError):
        run(GAConfig(**kwargs))


def test_run_single_column():
    result = run(GAConfig(n=1))
    assert result.best == (1,)
    assert result.best_fitness == 0
    assert result.generations_run == 0
    assert result.terminated_by is Termination.SOLVED


@pytest.mark.parametrize("n", [2, 3])
def test_run_unsolvable(n):
    optimum = exhaustive_min_excess(n)
    assert optimum == 1
    result = run(GAConfig(n=n, population_size=20, stagnation_window=30, seed=n))
    assert result.best_fitness == optimum
    assert result.terminated_by is Termination.STAGNATION
    result = run(GAConfig(n=n, population_size=20, max_generations=15, seed=n))
    assert result.best_fitness == optimum
    assert result.terminated_by is Termination.GENERATION_BUDGET


def test_run_solves_eight():
    result = run(GAConfig(n=8, seed=3))
    assert result.best_fitness == 0
    assert pairwise_attack_count(result.best).attacking_pairs == 0


def test_run_deterministic():
    config = GAConfig(n=16, population_size=60, seed=123)
    a, b = run(config), run(config)
    for field in ("best", "best_fitness", "generations_run", "fitness_evaluations",
                  "terminated_by", "trace"):
        assert getattr(a, field) == getattr(b, field)


def test_run_trace_and_integrity():
    result = run(GAConfig(n=12, population_size=40, seed=4))
    assert list(result.trace) == sorted(result.trace, reverse=True)
    assert result.trace[-1] == result.best_fitness == fitness(result.best)
    assert len(result.trace) == result.generations_run + 1
    assert (result.terminated_by is Termination.SOLVED) == (result.best_fitness == 0)


@pytest.mark.parametrize("n, pop_size", [(12, 40), (16, 31), (3, 10)])
def test_evaluation_accounting(n, pop_size):
    config = GAConfig(n=n, population_size=pop_size, seed=7, max_generations=25)
    result = run(config)
    repo = repository_size(n)
    per_generation = pop_size + (2 if repo >= 2 else 0) + 1
    assert result.fitness_evaluations == pop_size + per_generation * result.generations_run


def test_counting_evaluator():
    ev = CountingEvaluator()
    assert ev((1, 2, 3)) == 2
    ev((2, 4, 1, 3))
    assert ev.calls == 2


def test_instrumented_run_closure_and_frozen_repository():
    config = GAConfig(n=10, population_size=24, max_generations=40, seed=1)
    snapshots = []

    def watch(generation, population, repo):
        assert len(population) == 24
        for genes, f in population:
            assert validate_permutation(genes) and len(genes) == 10
            assert f == fitness(genes)
        assert [f for _, f in population] == sorted(f for _, f in population)
        snapshots.append(repr(repo).encode())

    run(config, on_generation=watch)
    assert len(snapshots) >= 2
    assert len(set(snapshots)) == 1
