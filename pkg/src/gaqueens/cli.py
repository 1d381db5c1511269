"""Command-line entry point: ``gaqueens solve | verify | bench``.

Exit codes: 0 solved (or verified conflict-free), 2 ran but unsolved,
64 usage error, 65 bad data, 74 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence

from .core import (
    QueensError,
    RenderError,
    format_tuple,
    pairwise_attack_count,
    parse_tuple,
    render_board,
)
from .core import fitness as board_fitness
from .engine import GAConfig, SolveResult, Termination, run
from .operators import OperatorParams

EXIT_OK = 0
EXIT_UNSOLVED = 2
EXIT_USAGE = 64
EXIT_DATAERR = 65
EXIT_IOERR = 74

CSV_COLUMNS = (
    "n", "seed", "best_fitness", "generations_run", "fitness_evaluations",
    "wall_time_ms", "terminated_by", "solution",
    "pop_size", "max_generations", "stagnation_window",
    "crossover_prob", "mutation_prob", "double_mutation_prob", "elitism",
)
WALL_TIME_FIELDS = ("wall_time_ms",)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags, which collides with "unsolved"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclasses.dataclass
class ResultRecord:
    n: int
    seed: int
    best_fitness: int
    generations_run: int
    fitness_evaluations: int
    wall_time_ms: int
    terminated_by: str
    solution: str
    pop_size: int
    max_generations: int
    stagnation_window: int
    crossover_prob: float
    mutation_prob: float
    double_mutation_prob: float
    elitism: int

    @classmethod
    def from_result(cls, config: GAConfig, result: SolveResult) -> "ResultRecord":
        p = config.operator_params
        return cls(
            n=config.n,
            seed=config.seed,
            best_fitness=result.best_fitness,
            generations_run=result.generations_run,
            fitness_evaluations=result.fitness_evaluations,
            wall_time_ms=result.wall_time_ms,
            terminated_by=result.terminated_by.value,
            solution=format_tuple(result.best),
            pop_size=config.population_size,
            max_generations=config.max_generations,
            stagnation_window=config.stagnation_window or 0,
            crossover_prob=p.crossover_prob,
            mutation_prob=p.mutation_prob,
            double_mutation_prob=p.double_mutation_prob,
            elitism=config.elitism_count,
        )

    @classmethod
    def from_mapping(cls, row: Dict[str, object]) -> "ResultRecord":
        """Rebuild from a parsed JSON object or CSV row (strings are coerced)."""
        kwargs = {}
        for f in dataclasses.fields(cls):
            value = row[f.name]
            if f.type in ("int", int):
                value = int(value)
            elif f.type in ("float", float):
                value = float(value)
            else:
                value = str(value)
            kwargs[f.name] = value
        return cls(**kwargs)

    def as_dict(self) -> Dict[str, object]:
        return {name: getattr(self, name) for name in CSV_COLUMNS}

    def to_json(self) -> str:
        return json.dumps(self.as_dict())

    def to_text(self) -> str:
        return "\n".join(f"{k}: {v}" for k, v in self.as_dict().items())


def write_records(stream, records: Sequence[ResultRecord], fmt: str) -> None:
    """JSON lines for ``json``; CSV with a header row otherwise."""
    if fmt == "json":
        for rec in records:
            stream.write(rec.to_json() + "\n")
        return
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow(rec.as_dict())


def read_records(stream, fmt: str) -> List[ResultRecord]:
    if fmt == "json":
        return [ResultRecord.from_mapping(json.loads(line)) for line in stream if line.strip()]
    return [ResultRecord.from_mapping(row) for row in csv.DictReader(stream)]


def _probability(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1]: {text}")
    return p


def _n_list(text: str) -> List[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty --n-list")
    return values


def _add_ga_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pop-size", type=int, default=1000)
    p.add_argument("--max-generations", type=int, default=5000)
    p.add_argument("--stagnation-window", type=int, default=500,
                   help="generations without improvement before stopping; 0 disables")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--crossover-prob", type=_probability, default=0.9)
    p.add_argument("--mutation-prob", type=_probability, default=0.8)
    p.add_argument("--double-mutation-prob", type=_probability, default=0.4)
    p.add_argument("--elitism", type=int, default=1)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gaqueens", description="Genetic algorithm N-Queens solver")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = sub.add_parser("solve", help="run the solver once")
    solve.add_argument("--n", type=int, required=True)
    solve.add_argument("--render", action="store_true", help="print the board")
    _add_ga_flags(solve)

    verify = sub.add_parser("verify", help="score a tuple")
    src = verify.add_mutually_exclusive_group(required=True)
    src.add_argument("--tuple", dest="tuple_text")
    src.add_argument("--file")
    verify.add_argument("--format", choices=("text", "json"), default="text")

    bench = sub.add_parser("bench", help="run seeded trials over several board sizes")
    bench.add_argument("--n-list", type=_n_list, required=True)
    bench.add_argument("--trials", type=int, default=10)
    bench.add_argument("--out", help="record file (JSON lines for --format json, CSV otherwise)")
    bench.add_argument("--jobs", type=int, default=1, help="concurrent worker processes")
    _add_ga_flags(bench)
    return parser


def _config(args, n: int, seed: int) -> GAConfig:
    return GAConfig(
        n=n,
        population_size=args.pop_size,
        max_generations=args.max_generations,
        stagnation_window=args.stagnation_window or None,
        operator_params=OperatorParams(args.crossover_prob, args.mutation_prob,
                                       args.double_mutation_prob),
        seed=seed,
        elitism_count=args.elitism,
    )


def _run_record(config: GAConfig) -> ResultRecord:
    return ResultRecord.from_result(config, run(config))


def cmd_solve(args, out) -> int:
    config = _config(args, args.n, args.seed)
    config.validate()
    result = run(config)
    record = ResultRecord.from_result(config, result)
    out.write(record.solution + "\n")
    if args.render:
        try:
            out.write(render_board(result.best) + "\n")
        except RenderError as exc:
            print(f"gaqueens: {exc}", file=sys.stderr)
    if args.format == "json":
        out.write(record.to_json() + "\n")
    elif args.format == "csv":
        write_records(out, [record], "csv")
    else:
        out.write(record.to_text() + "\n")
    return EXIT_OK if result.terminated_by is Termination.SOLVED else EXIT_UNSOLVED


def cmd_verify(args, out) -> int:
    if args.file is not None:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = args.tuple_text
    genes = parse_tuple(text)
    score = board_fitness(genes)
    report = pairwise_attack_count(genes)
    conflicts = sorted(report.conflicting_diagonals().items())
    if args.format == "json":
        out.write(json.dumps({
            "n": len(genes),
            "solution": format_tuple(genes),
            "fitness": score,
            "attacking_pairs": report.attacking_pairs,
            "conflicts": [{"direction": d, "key": k, "queens": q} for (d, k), q in conflicts],
        }) + "\n")
    else:
        out.write(f"n: {len(genes)}\n")
        out.write(f"fitness: {score}\n")
        out.write(f"attacking_pairs: {report.attacking_pairs}\n")
        if conflicts:
            for (direction, key), queens in conflicts:
                out.write(f"conflict: {direction} diagonal {key}: {queens} queens\n")
        else:
            out.write("conflicts: none\n")
    return EXIT_OK if score == 0 else EXIT_UNSOLVED


def _summary(records: Sequence[ResultRecord]) -> str:
    lines = [f"{'n':>6} {'runs':>5} {'solve_rate':>10} {'med_gens':>9} {'med_ms':>9}"]
    for n in sorted({r.n for r in records}):
        rows = [r for r in records if r.n == n]
        rate = sum(r.best_fitness == 0 for r in rows) / len(rows)
        gens = statistics.median(r.generations_run for r in rows)
        ms = statistics.median(r.wall_time_ms for r in rows)
        lines.append(f"{n:>6} {len(rows):>5} {rate:>10.2f} {gens:>9g} {ms:>9g}")
    return "\n".join(lines)


def cmd_bench(args, out) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    configs = [_config(args, n, args.seed + t) for n in args.n_list for t in range(args.trials)]
    for config in configs:
        config.validate()
    # open the output before any work so an unwritable path fails fast
    sink = open(args.out, "w", encoding="utf-8", newline="") if args.out else None
    try:
        if args.jobs == 1:
            records = [_run_record(c) for c in configs]
        else:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                records = list(pool.map(_run_record, configs))
        records.sort(key=lambda r: (r.n, r.seed))
        if sink is not None:
            write_records(sink, records, args.format)
    finally:
        if sink is not None:
            sink.close()
    out.write(_summary(records) + "\n")
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "bench": cmd_bench}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"gaqueens: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QueensError as exc:
        print(f"gaqueens: {exc}", file=sys.stderr)
        return EXIT_DATAERR
    except OSError as exc:
        print(f"gaqueens: {exc}", file=sys.stderr)
        return EXIT_IOERR


if __name__ == "__main__":
    sys.exit(main())
