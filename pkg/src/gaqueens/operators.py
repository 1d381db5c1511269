"""Permutation-preserving genetic operators.

Positions at this interface are 1-based columns, matching the tuple
notation. Every random decision is drawn from the ``random.Random``
instance passed in, never from the module-level generator.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from operator import itemgetter
from typing import List, NamedTuple, Sequence, Tuple

from .core import Chromosome, QueensError


class OperatorError(QueensError):
    pass


class CutPair(NamedTuple):
    """Inclusive 1-based segment ``[lo, hi]`` copied from the first parent."""

    lo: int
    hi: int


@dataclass(frozen=True)
class OperatorParams:
    crossover_prob: float = 0.9
    mutation_prob: float = 0.8
    double_mutation_prob: float = 0.4

    def __post_init__(self):
        for name in ("crossover_prob", "mutation_prob", "double_mutation_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise OperatorError(f"{name} must lie in [0, 1], got {p}")


def fires(rng: random.Random, p: float) -> bool:
    # u in [0, 1): p == 0 never fires, p == 1 always does
    return rng.random() < p


def sample_cuts(n: int, rng: random.Random) -> CutPair:
    """Two distinct positions, ordered. A one-column board yields ``(1, 1)``."""
    if n < 2:
        return CutPair(1, 1)
    a, b = sample_positions(n, rng)
    return CutPair(a, b) if a < b else CutPair(b, a)


def sample_positions(n: int, rng: random.Random) -> Tuple[int, int]:
    """Uniform ordered pair of distinct 1-based positions; needs ``n >= 2``."""
    i = rng.randrange(n)
    j = rng.randrange(n - 1)
    if j >= i:
        j += 1
    return i + 1, j + 1


def order1_crossover(parent1: Sequence[int], parent2: Sequence[int],
                     cuts: CutPair) -> Chromosome:
    """OX1: keep ``parent1[lo..hi]`` in place, fill the rest in parent2's order."""
    n = len(parent1)
    if len(parent2) != n:
        raise OperatorError(f"parent lengths differ: {n} vs {len(parent2)}")
    lo, hi = cuts
    if not 1 <= lo <= hi <= n:
        raise OperatorError(f"invalid cuts {tuple(cuts)} for length {n}")
    segment = tuple(parent1[lo - 1:hi])
    taken = set(segment)
    fill = [g for g in parent2 if g not in taken]
    return tuple(fill[:lo - 1]) + segment + tuple(fill[lo - 1:])


def crossover_pair(a: Sequence[int], b: Sequence[int], cuts_ab: CutPair,
                   cuts_ba: CutPair) -> Tuple[Chromosome, Chromosome]:
    return order1_crossover(a, b, cuts_ab), order1_crossover(b, a, cuts_ba)


def swap_mutation(genes: Sequence[int], i: int, j: int) -> Chromosome:
    n = len(genes)
    if i == j:
        raise OperatorError("swap positions must differ")
    if not (1 <= i <= n and 1 <= j <= n):
        raise OperatorError(f"swap positions ({i}, {j}) outside 1..{n}")
    out = list(genes)
    out[i - 1], out[j - 1] = out[j - 1], out[i - 1]
    return tuple(out)


def apply_mutation_policy(genes: Sequence[int], params: OperatorParams,
                          rng: random.Random) -> Chromosome:
    """Single swap with ``mutation_prob``, then an extra swap with
    ``double_mutation_prob``; the two gates are independent.

    Boards with fewer than two columns cannot be swapped and come back as-is.
    """
    genes = tuple(genes)
    n = len(genes)
    if n < 2:
        return genes
    if fires(rng, params.mutation_prob):
        genes = swap_mutation(genes, *sample_positions(n, rng))
    if fires(rng, params.double_mutation_prob):
        genes = swap_mutation(genes, *sample_positions(n, rng))
    return genes


def rank_select(population: Sequence[Tuple[Chromosome, int]], count: int,
                rng: random.Random) -> List[Chromosome]:
    """Truncation selection: uniform draws, with replacement, from the best half.

    Ranking is by ascending fitness; equal fitness keeps the incoming order.
    """
    size = len(population)
    if size == 0:
        raise OperatorError("cannot select from an empty population")
    if not 1 <= count <= size:
        raise OperatorError(f"count must be in 1..{size}, got {count}")
    ranked = sorted(population, key=itemgetter(1))
    top = (size + 1) // 2
    return [ranked[rng.randrange(top)][0] for _ in range(count)]
