"""Command-line front door: analyze, simulate, compare, dump-chain.

`analyze` runs the exact engine on a game board or a chain file and
prints the summary statistics; `simulate` plays the game with the
seeded Monte Carlo sampler; `compare` runs both and checks every
statistic at 4 standard errors; `dump-chain` prints the compiled
chain as JSON.  Input documents are autodetected: a top-level "board"
field means a game spec, a top-level "edges" field means a chain.

Exit codes: 0 success, 1 runtime failure (including a failed
comparison), 2 input or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from math import inf, sqrt
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

from .chain import (
    AbsorptionRecord,
    ChainFormatError,
    InvalidChainError,
    WeightedMarkovChain,
    chain_from_json_dict,
    dumps_chain,
    run_absorption,
)
from .game import GameSpec, GameSpecError, builtin_game, compile_game, parse_game_spec
from .simulator import SimulationReport, simulate
from .stats import (
    SummaryStats,
    central_moments,
    distribution_moments,
    format_fraction_scientific,
    render_stats,
    stats_json_dict,
    summarize,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """An input problem that is the caller's to fix; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """One resolved invocation; every cmd_* function consumes exactly this."""

    command: str
    input_path: Optional[str] = None
    builtin: Optional[str] = None
    rounds: int = 60
    trials: Optional[int] = None
    seed: int = 1
    digits: int = 13
    format: str = "text"
    full_record: bool = False
    output: Optional[str] = None


@dataclass(frozen=True)
class AnalysisTarget:
    """A chain ready to run: where to start and which capital level wins."""

    chain: WeightedMarkovChain
    start: str
    win_capital: int
    game: Optional[GameSpec]


def _load_document(config: RunConfig) -> Union[GameSpec, dict]:
    """Load the input as a GameSpec or a raw chain dict, autodetected."""
    if (config.builtin is None) == (config.input_path is None):
        raise UsageError("provide exactly one input: a file path or --builtin")
    if config.builtin is not None:
        return builtin_game(config.builtin)
    try:
        text = Path(config.input_path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {config.input_path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{config.input_path}: invalid JSON: {exc}") from None
    if isinstance(data, dict) and "board" in data:
        return parse_game_spec(data)
    if isinstance(data, dict) and "edges" in data:
        return data
    raise UsageError(
        f"{config.input_path}: document has neither a 'board' (game) nor an "
        f"'edges' (chain) field"
    )


def _resolve_target(config: RunConfig) -> AnalysisTarget:
    """Compile or decode the input into a runnable chain."""
    document = _load_document(config)
    if isinstance(document, GameSpec):
        return AnalysisTarget(
            chain=compile_game(document),
            start="1",
            win_capital=document.win_threshold,
            game=document,
        )
    chain = chain_from_json_dict(document)
    violations = chain.validate()
    if violations:
        raise InvalidChainError(violations)
    start = document.get("start", chain.transient[0])
    if not isinstance(start, str) or start not in chain.transient_set:
        raise UsageError(f"start state {start!r} is not a transient state of the chain")
    # For a bare chain, "winning" means topping out the capital window.
    return AnalysisTarget(
        chain=chain, start=start, win_capital=chain.support[1], game=None
    )


def _require_game(config: RunConfig) -> GameSpec:
    document = _load_document(config)
    if not isinstance(document, GameSpec):
        raise UsageError(f"{config.command} needs a game spec, not a chain document")
    return document


def _emit(text: str, config: RunConfig) -> None:
    if config.output:
        Path(config.output).write_text(text)
    else:
        sys.stdout.write(text)


def _record_entries(record: AbsorptionRecord) -> list[dict]:
    entries = []
    for (round_index, state), poly in sorted(record.absorbed.items()):
        entries.append(
            {
                "round": round_index,
                "state": state,
                "mass": str(poly.mass()),
                "coefficients": {
                    str(exponent): str(coeff) for exponent, coeff in poly.terms()
                },
            }
        )
    return entries


def cmd_analyze(config: RunConfig) -> int:
    target = _resolve_target(config)
    record = run_absorption(target.chain, target.start, config.rounds)
    if record.epsilon == 1:
        if config.format == "json":
            payload: dict = {
                "M": record.rounds_run,
                "epsilon": {"decimal": "1", "fraction": "1"},
                "statistics": None,
            }
            if config.full_record:
                payload["record"] = []
            _emit(json.dumps(payload, indent=2) + "\n", config)
        else:
            lines = [
                f"horizon M  {record.rounds_run}",
                "epsilon    1",
                "no mass absorbed within the horizon; statistics undefined",
            ]
            _emit("".join(line + "\n" for line in lines), config)
        return EXIT_OK
    stats = summarize(record, target.win_capital)
    conditional = record.conditional()
    if config.format == "json":
        payload = stats_json_dict(stats, config.digits)
        if config.full_record:
            payload["record"] = _record_entries(conditional)
        _emit(json.dumps(payload, indent=2) + "\n", config)
    else:
        body = render_stats(stats, config.digits, "text")
        if config.full_record:
            lines = ["", "absorbed polynomials (conditional on absorption):"]
            for entry in _record_entries(conditional):
                poly_text = " + ".join(
                    f"{coeff}*t^{exponent}"
                    for exponent, coeff in sorted(
                        (int(e), c) for e, c in entry["coefficients"].items()
                    )
                )
                lines.append(
                    f"round {entry['round']:>3}  state {entry['state']:>4}  {poly_text}"
                )
            body += "".join(line + "\n" for line in lines)
        _emit(body, config)
    return EXIT_OK


def cmd_simulate(config: RunConfig) -> int:
    spec = _require_game(config)
    report = simulate(spec, config.trials, config.seed, round_cap=10 * config.rounds)
    if config.format == "json":
        _emit(json.dumps(report.to_json_dict(), indent=2) + "\n", config)
    else:
        win_rate = report.wins / report.completed if report.completed else None
        rows = [
            ("trials", report.trials),
            ("seed", report.seed),
            ("round cap", report.round_cap),
            ("censored", report.censored),
            ("completed", report.completed),
            ("wins", report.wins),
            ("win rate", win_rate),
            ("chick mean", report.chick_mean),
            ("chick variance", report.chick_variance),
            ("rounds mean", report.rounds_mean),
            ("rounds variance", report.rounds_variance),
            ("correlation", report.correlation),
        ]
        width = max(len(label) for label, _ in rows)
        _emit(
            "".join(f"{label.ljust(width)}  {value!r}\n" if isinstance(value, float)
                    else f"{label.ljust(width)}  {value}\n" for label, value in rows),
            config,
        )
    return EXIT_OK


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    exact: float
    empirical: Optional[float]
    stderr: float
    z: Optional[float]
    passed: bool


def compare_statistics(
    stats: SummaryStats, record: AbsorptionRecord, report: SimulationReport
) -> tuple[list[ComparisonRow], bool]:
    """Check each empirical statistic against its exact value at 4 standard errors.

    Standard errors come from the exact distribution (for example
    sqrt(p(1-p)/n) for the win rate and sqrt((m4 - var^2)/n) for a
    variance), so the check needs no confidence machinery on the
    empirical side.
    """
    n = report.completed
    conditional = record.conditional()
    raw_capital = [conditional.marginal_capital().power_moment(r) for r in range(5)]
    m2_c, _, m4_c = central_moments(raw_capital)
    raw_rounds = distribution_moments(conditional.marginal_rounds().items(), upto=4)
    m2_r, _, m4_r = central_moments(raw_rounds)

    p = stats.win_probability
    targets: list[tuple[str, Fraction, Optional[float], Fraction]] = [
        (
            "win rate",
            p,
            report.wins / n if n else None,
            p * (1 - p),
        ),
        ("chick mean", stats.chick_mean, report.chick_mean, m2_c),
        ("chick variance", stats.chick_variance, report.chick_variance, m4_c - m2_c**2),
        ("rounds mean", stats.rounds_mean, report.rounds_mean, m2_r),
        ("rounds variance", stats.rounds_variance, report.rounds_variance, m4_r - m2_r**2),
    ]
    rows: list[ComparisonRow] = []
    for name, exact, empirical, sampling_variance in targets:
        rows.append(_compare_one(name, float(exact), empirical, sampling_variance, n))
    if stats.correlation is not None:
        rho = float(stats.correlation)
        # Delta-method spread of a sample correlation around rho.
        rows.append(
            _compare_one(
                "correlation",
                rho,
                report.correlation,
                Fraction((1 - rho * rho) ** 2),
                n,
            )
        )
    return rows, all(row.passed for row in rows)


def _compare_one(
    name: str,
    exact: float,
    empirical: Optional[float],
    sampling_variance: Fraction,
    n: int,
) -> ComparisonRow:
    if empirical is None or n == 0:
        return ComparisonRow(name, exact, empirical, 0.0, None, False)
    stderr = sqrt(sampling_variance / n) if sampling_variance > 0 else 0.0
    difference = abs(exact - empirical)
    if stderr == 0.0:
        return ComparisonRow(
            name, exact, empirical, 0.0, None if difference == 0 else inf,
            difference == 0,
        )
    z = difference / stderr
    return ComparisonRow(name, exact, empirical, stderr, z, z <= 4.0)


def cmd_compare(config: RunConfig) -> int:
    spec = _require_game(config)
    chain = compile_game(spec)
    record = run_absorption(chain, "1", config.rounds)
    stats = summarize(record, spec.win_threshold)
    report = simulate(spec, config.trials, config.seed, round_cap=10 * config.rounds)
    rows, all_pass = compare_statistics(stats, record, report)
    epsilon_text = format_fraction_scientific(stats.epsilon, config.digits)
    if config.format == "json":
        payload = {
            "trials": report.trials,
            "seed": report.seed,
            "round_cap": report.round_cap,
            "censored": report.censored,
            "epsilon": {"decimal": epsilon_text, "fraction": str(stats.epsilon)},
            "statistics": [
                {
                    "name": row.name,
                    "exact": row.exact,
                    "empirical": row.empirical,
                    "stderr": row.stderr,
                    "z": row.z,
                    "pass": row.passed,
                }
                for row in rows
            ],
            "pass": all_pass,
        }
        _emit(json.dumps(payload, indent=2) + "\n", config)
    else:
        header = f"{'statistic':<16} {'exact':>14} {'empirical':>14} {'stderr':>12} {'z':>7}  result"
        lines = [header]
        for row in rows:
            empirical = "-" if row.empirical is None else f"{row.empirical:.10g}"
            z = "-" if row.z is None else f"{row.z:.2f}"
            lines.append(
                f"{row.name:<16} {row.exact:>14.10g} {empirical:>14} "
                f"{row.stderr:>12.3g} {z:>7}  {'pass' if row.passed else 'FAIL'}"
            )
        lines.append(f"epsilon   {epsilon_text}")
        lines.append(f"censored  {report.censored}")
        passed = sum(1 for row in rows if row.passed)
        lines.append(
            f"result    {'PASS' if all_pass else 'FAIL'} ({passed}/{len(rows)})"
        )
        _emit("".join(line + "\n" for line in lines), config)
    return EXIT_OK if all_pass else EXIT_RUNTIME


def cmd_dump_chain(config: RunConfig) -> int:
    spec = _require_game(config)
    _emit(dumps_chain(compile_game(spec)), config)
    return EXIT_OK


_COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "dump-chain": cmd_dump_chain,
}


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capchain",
        description="Exact and Monte Carlo analysis of capped-capital absorbing chains.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_common(sub: argparse.ArgumentParser, with_horizon: bool = True) -> None:
        sub.add_argument("input", nargs="?", help="game or chain JSON file")
        sub.add_argument(
            "--builtin",
            choices=["simplified", "full"],
            help="use a shipped board instead of a file",
        )
        if with_horizon:
            sub.add_argument(
                "-M",
                "--rounds",
                type=_positive_int,
                default=60,
                help="analysis horizon in rounds (default 60)",
            )
        sub.add_argument(
            "--format", choices=["text", "json"], default="text", help="output format"
        )
        sub.add_argument("--output", help="write the report to this path instead of stdout")

    analyze = subparsers.add_parser("analyze", help="exact absorption analysis")
    add_common(analyze)
    analyze.add_argument(
        "--digits", type=_positive_int, default=13, help="rendered decimal places"
    )
    analyze.add_argument(
        "--full-record",
        action="store_true",
        help="also emit every (round, state) absorbed polynomial",
    )

    sim = subparsers.add_parser("simulate", help="seeded Monte Carlo play")
    add_common(sim)
    sim.add_argument("--trials", type=_positive_int, required=True)
    sim.add_argument("--seed", type=int, default=1)

    compare = subparsers.add_parser("compare", help="exact vs empirical at 4 standard errors")
    add_common(compare)
    compare.add_argument("--trials", type=_positive_int, required=True)
    compare.add_argument("--seed", type=int, default=1)
    compare.add_argument(
        "--digits", type=_positive_int, default=13, help="rendered decimal places"
    )

    dump = subparsers.add_parser("dump-chain", help="print the compiled chain JSON")
    add_common(dump, with_horizon=False)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    config = RunConfig(
        command=args.command,
        input_path=args.input,
        builtin=args.builtin,
        rounds=getattr(args, "rounds", 60),
        trials=getattr(args, "trials", None),
        seed=getattr(args, "seed", 1),
        digits=getattr(args, "digits", 13),
        format=args.format,
        full_record=getattr(args, "full_record", False),
        output=args.output,
    )
    try:
        return _COMMANDS[config.command](config)
    except (GameSpecError, InvalidChainError) as exc:
        for line in exc.diagnostics if isinstance(exc, GameSpecError) else exc.violations:
            print(f"error: {line}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ChainFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
