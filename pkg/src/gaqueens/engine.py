"""Generation loop with a frozen repository of weak chromosomes.

One ``random.Random`` seeded from ``GAConfig.seed`` drives a whole run, and
it is consumed in a fixed order: population init, then per generation the
parent draws, crossover gates and cuts, mutation gates and positions, and
finally the two repository infusions.
"""

from __future__ import annotations

import enum
import math
import random
import time
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from .core import Chromosome, QueensError, diagonal_conflicts
from .operators import (
    OperatorParams,
    apply_mutation_policy,
    crossover_pair,
    fires,
    order1_crossover,
    rank_select,
    sample_cuts,
)

Scored = Tuple[Chromosome, int]
Population = List[Scored]
Repository = Tuple[Chromosome, ...]
Evaluator = Callable[[Sequence[int]], int]


class ConfigError(QueensError):
    pass


class Termination(str, enum.Enum):
    CONTINUE = "continue"
    SOLVED = "solved"
    GENERATION_BUDGET = "generation_budget"
    STAGNATION = "stagnation"


@dataclass(frozen=True)
class GAConfig:
    n: int
    population_size: int = 1000
    max_generations: int = 5000
    stagnation_window: Optional[int] = 500  # None or 0 disables
    operator_params: OperatorParams = field(default_factory=OperatorParams)
    seed: int = 0
    elitism_count: int = 1

    def validate(self) -> None:
        if self.n < 1:
            raise ConfigError(f"board size must be >= 1, got {self.n}")
        if self.population_size < 1:
            raise ConfigError("population_size must be positive")
        if self.n >= 2 and self.population_size < 2:
            raise ConfigError("population_size must be >= 2 for n >= 2")
        if self.max_generations < 1:
            raise ConfigError("max_generations must be positive")
        if self.stagnation_window is not None and self.stagnation_window < 0:
            raise ConfigError("stagnation_window must be >= 0")
        if not 0 <= self.elitism_count < self.population_size:
            raise ConfigError("elitism_count must be in [0, population_size)")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if repository_size(self.n) > self.population_size:
            raise ConfigError(
                f"repository size {repository_size(self.n)} exceeds "
                f"population_size {self.population_size}")


@dataclass
class SolveResult:
    best: Chromosome
    best_fitness: int
    generations_run: int
    fitness_evaluations: int
    wall_time_ms: int
    terminated_by: Termination
    trace: Tuple[int, ...] = ()


class CountingEvaluator:
    """Fitness callable that records how many times it was invoked."""

    def __init__(self, fn: Evaluator = diagonal_conflicts):
        self.fn = fn
        self.calls = 0

    def __call__(self, genes: Sequence[int]) -> int:
        self.calls += 1
        return self.fn(genes)


def repository_size(n: int) -> int:
    return math.isqrt(n)


def _sort(members) -> Population:
    return sorted(members, key=lambda m: m[1])


def init_population(config: GAConfig, rng: random.Random,
                    evaluate: Evaluator = diagonal_conflicts) -> Population:
    members = []
    base = list(range(1, config.n + 1))
    for _ in range(config.population_size):
        genes = base[:]
        rng.shuffle(genes)
        genes = tuple(genes)
        members.append((genes, evaluate(genes)))
    return _sort(members)


def init_repository(config: GAConfig, population: Population) -> Repository:
    """The floor(sqrt(N)) worst members of the sorted initial population."""
    size = repository_size(config.n)
    if size > len(population):
        raise ConfigError(
            f"repository size {size} exceeds population size {len(population)}")
    if size == 0:
        return ()
    return tuple(genes for genes, _ in population[-size:])


def _compete(population: Population, genes: Chromosome, score: int) -> None:
    """Replace the worst member in place iff ``score`` is strictly better."""
    if score >= population[-1][1]:
        return
    population.pop()
    keys = [m[1] for m in population]
    population.insert(bisect_right(keys, score), (genes, score))


def repository_infusion_pair(repo: Repository, population: Population,
                             params: OperatorParams, rng: random.Random,
                             evaluate: Evaluator = diagonal_conflicts) -> Population:
    """Cross two distinct repository members; mutated offspring compete for a place.

    With fewer than two repository members this is a no-op.
    """
    population = list(population)
    if len(repo) < 2:
        return population
    n = len(repo[0])
    a, b = rng.sample(range(len(repo)), 2)
    children = crossover_pair(repo[a], repo[b], sample_cuts(n, rng), sample_cuts(n, rng))
    for child in children:
        child = apply_mutation_policy(child, params, rng)
        _compete(population, child, evaluate(child))
    return population


def repository_infusion_single(repo: Repository, population: Population,
                               params: OperatorParams, rng: random.Random,
                               evaluate: Evaluator = diagonal_conflicts) -> Population:
    """Cross a random repository member with a random population member.

    The repository member is the segment donor and the single child is not
    mutated. ``params`` is accepted for symmetry with the pair infusion.
    """
    if not repo:
        raise ConfigError("repository is empty")
    if not population:
        raise ConfigError("population is empty")
    population = list(population)
    donor = repo[rng.randrange(len(repo))]
    mate = population[rng.randrange(len(population))][0]
    child = order1_crossover(donor, mate, sample_cuts(len(donor), rng))
    _compete(population, child, evaluate(child))
    return population


def evolve_generation(population: Population, repo: Repository, config: GAConfig,
                      rng: random.Random,
                      evaluate: Evaluator = diagonal_conflicts) -> Population:
    params = config.operator_params
    size = config.population_size
    n = config.n

    parents = rank_select(population, size, rng)
    if size % 2:
        parents += rank_select(population, 1, rng)
    offspring: List[Chromosome] = []
    for k in range(0, len(parents), 2):
        a, b = parents[k], parents[k + 1]
        if fires(rng, params.crossover_prob):
            a, b = crossover_pair(a, b, sample_cuts(n, rng), sample_cuts(n, rng))
        offspring.append(apply_mutation_policy(a, params, rng))
        offspring.append(apply_mutation_policy(b, params, rng))
    children = [(child, evaluate(child)) for child in offspring[:size]]

    # (mu + lambda): elites are kept outright, then the pool of remaining
    # parents and all children is truncated; stable sort keeps parents ahead of ties
    elite = population[:config.elitism_count]
    pool = _sort(population[config.elitism_count:] + children)
    survivors = _sort(elite + pool[:size - len(elite)])

    if repo:
        survivors = repository_infusion_pair(repo, survivors, params, rng, evaluate)
        survivors = repository_infusion_single(repo, survivors, params, rng, evaluate)
    return survivors


def check_termination(best_trace: Sequence[int], generation: int,
                      config: GAConfig) -> Termination:
    """``best_trace[g]`` is the best fitness after generation ``g``."""
    if best_trace[-1] == 0:
        return Termination.SOLVED
    if generation >= config.max_generations:
        return Termination.GENERATION_BUDGET
    window = config.stagnation_window
    if window and len(best_trace) > window and best_trace[-1] >= best_trace[-1 - window]:
        return Termination.STAGNATION
    return Termination.CONTINUE


def run(config: GAConfig,
        on_generation: Optional[Callable[[int, Population, Repository], None]] = None,
        ) -> SolveResult:
    """Evolve until solved, out of generations, or stagnant.

    ``on_generation(g, population, repository)`` is called after the initial
    population (g = 0) and after every generation, for instrumentation.
    """
    config.validate()
    start = time.perf_counter()
    rng = random.Random(config.seed)
    evaluate = CountingEvaluator()

    population = init_population(config, rng, evaluate)
    repo = init_repository(config, population)
    best = population[0]
    trace = [best[1]]
    generation = 0
    if on_generation:
        on_generation(generation, population, repo)

    status = check_termination(trace, generation, config)
    while status is Termination.CONTINUE:
        population = evolve_generation(population, repo, config, rng, evaluate)
        generation += 1
        if population[0][1] < best[1]:
            best = population[0]
        trace.append(best[1])
        if on_generation:
            on_generation(generation, population, repo)
        status = check_termination(trace, generation, config)

    return SolveResult(
        best=best[0],
        best_fitness=best[1],
        generations_run=generation,
        fitness_evaluations=evaluate.calls,
        wall_time_ms=int((time.perf_counter() - start) * 1000),
        terminated_by=status,
        trace=tuple(trace),
    )
