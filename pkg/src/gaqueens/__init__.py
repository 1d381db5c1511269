"""Genetic algorithm for the N-Queens problem with a frozen weak-chromosome repository."""

from .core import (
    Chromosome,
    ConflictReport,
    ParseError,
    PermutationError,
    QueensError,
    RenderError,
    fitness,
    format_tuple,
    pairwise_attack_count,
    parse_tuple,
    render_board,
    validate_permutation,
)
from .engine import ConfigError, GAConfig, SolveResult, Termination, run
from .operators import (
    CutPair,
    OperatorError,
    OperatorParams,
    apply_mutation_policy,
    crossover_pair,
    order1_crossover,
    rank_select,
    swap_mutation,
)

__version__ = "0.1.0"
