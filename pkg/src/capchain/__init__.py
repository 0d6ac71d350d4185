"""Exact analysis of capital-weighted absorbing Markov chains.

The engine evolves, round by round, the joint distribution of (state,
accumulated capital) for a finite absorbing chain whose edges carry
exact rational probabilities and integer capital weights.  Capital is
kept as a capped probability-generating polynomial, so floors and caps
("never below zero", "at least N wins") are a single clamped shift,
and every probability and moment comes out as an exact fraction.

Shipped on top of the engine: a chick-counting race game that compiles
to such a chain, a statistics extractor, a seeded Monte Carlo oracle,
and the `capchain` command-line tool.
"""

from .chain import (
    AbsorptionRecord,
    ChainFormatError,
    Edge,
    InvalidChainError,
    StateVector,
    WeightedMarkovChain,
    chain_from_json_dict,
    chain_to_json_dict,
    conditional_record,
    dumps_chain,
    loads_chain,
    marginal_capital,
    marginal_rounds,
    run_absorption,
    umbra_step,
    validate_chain,
)
from .game import (
    EMPTY,
    FULL_GAME_JSON,
    SIMPLIFIED_GAME_JSON,
    TERMINAL,
    GameSpec,
    GameSpecError,
    builtin_game,
    chick_gain,
    compile_game,
    next_location,
    parse_game_spec,
)
from .poly import CappedPolynomial, rat
from .simulator import SimulationReport, SplitMix64, mix64, play_once, simulate
from .stats import (
    SummaryStats,
    central_moments,
    distribution_moments,
    format_fraction,
    format_fraction_scientific,
    render_stats,
    stats_json_dict,
    summarize,
)

__version__ = "1.0.0"

__all__ = [
    "AbsorptionRecord",
    "CappedPolynomial",
    "ChainFormatError",
    "EMPTY",
    "Edge",
    "FULL_GAME_JSON",
    "GameSpec",
    "GameSpecError",
    "InvalidChainError",
    "SIMPLIFIED_GAME_JSON",
    "SimulationReport",
    "SplitMix64",
    "StateVector",
    "SummaryStats",
    "TERMINAL",
    "WeightedMarkovChain",
    "builtin_game",
    "central_moments",
    "chain_from_json_dict",
    "chain_to_json_dict",
    "chick_gain",
    "compile_game",
    "conditional_record",
    "distribution_moments",
    "dumps_chain",
    "format_fraction",
    "format_fraction_scientific",
    "loads_chain",
    "marginal_capital",
    "marginal_rounds",
    "mix64",
    "next_location",
    "parse_game_spec",
    "play_once",
    "rat",
    "render_stats",
    "run_absorption",
    "simulate",
    "stats_json_dict",
    "summarize",
    "umbra_step",
    "validate_chain",
    "__version__",
]
