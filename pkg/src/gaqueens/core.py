"""Board representation, diagonal-conflict fitness, and the pairwise oracle.

A chromosome is a tuple of 1-based rows: ``genes[i]`` is the row of the
queen standing in column ``i + 1``. Because the tuple is a permutation of
``1..N`` no two queens share a row or a column, so only the two diagonal
directions can produce conflicts.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from operator import add, sub
from typing import Dict, Iterable, List, Sequence, Tuple

Chromosome = Tuple[int, ...]

# diagonal ids: ("down", c - i) for the falling direction, ("up", c + i) for the rising one
DOWN = "down"
UP = "up"
DiagonalId = Tuple[str, int]

DEFAULT_RENDER_CAP = 200

_TOKEN = re.compile(r"[+-]?\d+")


class QueensError(ValueError):
    """Base class for every error raised by this package."""


class PermutationError(QueensError):
    """A gene sequence is not a permutation of ``1..N``."""

    def __init__(self, genes: Sequence[int]):
        self.genes = tuple(genes)
        n = len(self.genes)
        counts = Counter(self.genes)
        self.duplicated = sorted(v for v, k in counts.items() if k > 1)
        self.missing = [v for v in range(1, n + 1) if v not in counts]
        self.out_of_range = sorted(v for v in counts if not 1 <= v <= n)
        parts = []
        if n == 0:
            parts.append("empty sequence")
        if self.duplicated:
            parts.append("duplicated " + ", ".join(map(str, self.duplicated)))
        if self.missing:
            parts.append("missing " + ", ".join(map(str, self.missing)))
        if self.out_of_range:
            parts.append("out of range " + ", ".join(map(str, self.out_of_range)))
        super().__init__(f"not a permutation of 1..{n}: " + "; ".join(parts))


class ParseError(QueensError):
    """Malformed tuple text. ``position`` is the 1-based token index."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"token {position}: {message}")


class RenderError(QueensError):
    pass


@dataclass(frozen=True)
class ConflictReport:
    attacking_pairs: int
    per_diagonal_counts: Dict[DiagonalId, int] = field(default_factory=dict)

    def conflicting_diagonals(self) -> Dict[DiagonalId, int]:
        """Diagonals holding two or more queens."""
        return {d: k for d, k in self.per_diagonal_counts.items() if k > 1}

    def excess_queens(self) -> int:
        """Sum of ``k - 1`` over occupied diagonals; equals the fitness score."""
        return sum(k - 1 for k in self.per_diagonal_counts.values())


def validate_permutation(genes: Iterable[int]) -> bool:
    genes = tuple(genes)
    n = len(genes)
    if n == 0:
        return False
    return len(set(genes)) == n and min(genes) == 1 and max(genes) == n


def _require_permutation(genes: Sequence[int]) -> Chromosome:
    genes = tuple(genes)
    if not validate_permutation(genes):
        raise PermutationError(genes)
    return genes


def diagonal_conflicts(genes: Sequence[int]) -> int:
    """Fitness without the permutation check; used in the evolutionary hot loop.

    A diagonal holding ``k`` queens contributes ``k - 1`` points, so per
    direction the total is N minus the number of distinct diagonal keys
    (the same count as sorting the keys and tallying adjacent repeats).
    """
    n = len(genes)
    cols = range(1, n + 1)
    return (2 * n - len(set(map(sub, genes, cols)))
            - len(set(map(add, genes, cols))))


def fitness(genes: Sequence[int]) -> int:
    """Conflict score of a board; 0 means no two queens attack each other.

    Raises PermutationError for anything that is not a permutation of 1..N.
    """
    return diagonal_conflicts(_require_permutation(genes))


def pairwise_attack_count(genes: Sequence[int]) -> ConflictReport:
    """Brute-force check of every unordered column pair.

    Deliberately shares no code with :func:`fitness` so the two can be
    compared against each other.
    """
    genes = _require_permutation(genes)
    n = len(genes)
    pairs = 0
    for i in range(n):
        for j in range(i + 1, n):
            ci, cj = genes[i], genes[j]
            if ci - i == cj - j or ci + i == cj + j:
                pairs += 1
    counts: Dict[DiagonalId, int] = {}
    for col, row in enumerate(genes, 1):
        for key in ((DOWN, row - col), (UP, row + col)):
            counts[key] = counts.get(key, 0) + 1
    return ConflictReport(pairs, counts)


def parse_tuple(text: str) -> Chromosome:
    """Parse ``"(2, 4, 1, 3)"`` style text into a validated chromosome."""
    body = text.strip()
    if body.startswith("("):
        if not body.endswith(")"):
            raise ParseError("unbalanced parenthesis", 1)
        body = body[1:-1]
    elif body.endswith(")"):
        raise ParseError("unbalanced parenthesis", max(1, body.count(",") + 1))
    tokens = body.split(",")
    genes: List[int] = []
    for pos, token in enumerate(tokens, 1):
        token = token.strip()
        if not token:
            raise ParseError("empty value", pos)
        if not _TOKEN.fullmatch(token):
            raise ParseError(f"not an integer: {token!r}", pos)
        genes.append(int(token))
    return _require_permutation(genes)


def format_tuple(genes: Sequence[int]) -> str:
    return ",".join(map(str, genes))


def render_board(genes: Sequence[int], cap: int = DEFAULT_RENDER_CAP,
                 queen: str = "Q", empty: str = ".") -> str:
    """Text grid, top line is row N, so column i holds a queen on line N - c_i."""
    genes = _require_permutation(genes)
    n = len(genes)
    if n > cap:
        raise RenderError(f"board of size {n} exceeds render cap {cap}")
    lines = []
    for row in range(n, 0, -1):
        lines.append(" ".join(queen if c == row else empty for c in genes))
    return "\n".join(lines)
