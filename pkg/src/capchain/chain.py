"""Weighted Markov chains with absorbing states, evolved exactly.

A WeightedMarkovChain is a finite directed graph.  Transient states
carry outgoing edges, each with an exact probability and an integer
weight (the capital collected when that edge is taken); absorbing
states have none.  The joint distribution of (current state,
accumulated capital) is a StateVector: a map from transient state id
to a CappedPolynomial over the chain's capital window.

`umbra_step` advances that distribution one round and splits off the
mass that lands in absorbing states.  `run_absorption` iterates it
for a fixed horizon and collects everything into an AbsorptionRecord:
one polynomial per (round, absorbing state), the unabsorbed residual,
and the total leftover mass epsilon.  All arithmetic is rational, so
absorbed mass plus epsilon is exactly 1 at every horizon.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, Optional, Union

from .poly import CappedPolynomial

StateVector = Dict[str, CappedPolynomial]


class ChainFormatError(ValueError):
    """Raised when a chain document cannot be decoded at all."""


class InvalidChainError(ValueError):
    """Raised when a structurally decoded chain breaks a chain invariant."""

    def __init__(self, violations: Iterable[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class Edge:
    """One transition: src --(prob, weight)--> dst."""

    src: str
    dst: str
    prob: Fraction
    weight: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "prob", Fraction(self.prob))


@dataclass(frozen=True)
class WeightedMarkovChain:
    transient: tuple[str, ...]
    absorbing: tuple[str, ...]
    edges: tuple[Edge, ...]
    support: tuple[int, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "transient", tuple(self.transient))
        object.__setattr__(self, "absorbing", tuple(self.absorbing))
        object.__setattr__(self, "edges", tuple(self.edges))
        lo, hi = self.support
        object.__setattr__(self, "support", (int(lo), int(hi)))

    @cached_property
    def transient_set(self) -> frozenset[str]:
        return frozenset(self.transient)

    @cached_property
    def absorbing_set(self) -> frozenset[str]:
        return frozenset(self.absorbing)

    @cached_property
    def out_edges(self) -> dict[str, tuple[Edge, ...]]:
        """Outgoing edges grouped by source state, in declaration order."""
        grouped: dict[str, list[Edge]] = {state: [] for state in self.transient}
        for edge in self.edges:
            grouped.setdefault(edge.src, []).append(edge)
        return {state: tuple(edges) for state, edges in grouped.items()}

    def validate(self) -> list[str]:
        """Return human-readable invariant violations, empty when the chain is sound."""
        violations: list[str] = []
        seen: set[str] = set()
        for state in self.transient + self.absorbing:
            if state in seen:
                violations.append(f"state {state!r} declared more than once")
            seen.add(state)
        lo, hi = self.support
        if lo > hi:
            violations.append(f"inverted capital support [{lo}, {hi}]")
        if not self.absorbing:
            violations.append("chain has no absorbing state")

        totals: dict[str, Fraction] = {state: Fraction(0) for state in self.transient}
        for index, edge in enumerate(self.edges):
            label = f"edge[{index}] {edge.src!r}->{edge.dst!r}"
            if edge.prob <= 0:
                violations.append(f"{label}: probability {edge.prob} is not positive")
            if edge.src in self.absorbing_set:
                violations.append(
                    f"{label}: absorbing state {edge.src!r} has an outgoing edge"
                )
            elif edge.src not in self.transient_set:
                violations.append(f"{label}: source state is not declared")
            else:
                totals[edge.src] += edge.prob
            if edge.dst not in self.transient_set and edge.dst not in self.absorbing_set:
                violations.append(f"{label}: destination state is not declared")
        for state, total in totals.items():
            if total != 1:
                violations.append(
                    f"state {state!r}: outgoing probabilities sum to {total}, expected 1"
                )
        return violations


def validate_chain(chain: WeightedMarkovChain) -> list[str]:
    """Functional spelling of WeightedMarkovChain.validate()."""
    return chain.validate()


def umbra_step(
    chain: WeightedMarkovChain, state_vector: StateVector
) -> tuple[StateVector, dict[str, CappedPolynomial]]:
    """Advance the joint (state, capital) distribution by one round.

    Every entry of the state vector is scattered along its outgoing
    edges: scaled by the edge probability and shifted (with clamping)
    by the edge weight.  Returns the next transient state vector and
    the mass absorbed during this round, keyed by absorbing state.
    Both sides drop all-zero polynomials, and the total mass of input
    equals the total mass of the two outputs exactly.
    """
    lo, hi = chain.support
    width = hi - lo + 1
    top = width - 1
    landed: dict[str, list[Fraction]] = {}
    for src, poly in state_vector.items():
        if src not in chain.transient_set:
            raise ValueError(f"state vector entry {src!r} is not a transient state")
        if poly.support != chain.support:
            raise ValueError(
                f"state {src!r}: polynomial support {poly.support} does not match "
                f"chain support {chain.support}"
            )
        if poly.is_zero:
            continue
        for edge in chain.out_edges[src]:
            cells = landed.get(edge.dst)
            if cells is None:
                cells = landed[edge.dst] = [Fraction(0)] * width
            # Fused poly.scale(edge.prob).shift_clamped(edge.weight), accumulated
            # in place; this inner loop is the engine's hot path.
            prob, weight = edge.prob, edge.weight
            for index, coeff in enumerate(poly.coeffs):
                if coeff:
                    cells[min(max(index + weight, 0), top)] += coeff * prob
    next_vector: StateVector = {}
    absorbed: dict[str, CappedPolynomial] = {}
    for state, cells in landed.items():
        poly = CappedPolynomial(lo, hi, tuple(cells))
        if poly.is_zero:
            continue
        if state in chain.absorbing_set:
            absorbed[state] = poly
        else:
            next_vector[state] = poly
    return next_vector, absorbed


@dataclass(frozen=True)
class AbsorptionRecord:
    """Everything a fixed-horizon absorption run produced.

    `absorbed` maps (round, absorbing state) to the capital polynomial
    of the mass that arrived there in that round; rounds are 1-based.
    `residual` is the still-transient state vector after the final
    round and `epsilon` is its total mass, so absorbed mass plus
    epsilon is exactly 1.
    """

    absorbed: dict[tuple[int, str], CappedPolynomial]
    rounds_run: int
    residual: StateVector
    epsilon: Fraction
    support: tuple[int, int]

    def total_absorbed_mass(self) -> Fraction:
        return sum((poly.mass() for poly in self.absorbed.values()), Fraction(0))

    def conditional(self) -> "AbsorptionRecord":
        """Condition on absorption within the horizon.

        Scales every absorbed polynomial by 1/(1 - epsilon) and drops
        the residual, so the returned record has total mass exactly 1.
        Raises ValueError when nothing was absorbed at all.
        """
        if self.epsilon == 1:
            raise ValueError("no mass was absorbed; cannot condition on absorption")
        if self.epsilon == 0:
            return self
        factor = 1 / (1 - self.epsilon)
        return AbsorptionRecord(
            absorbed={key: poly.scale(factor) for key, poly in self.absorbed.items()},
            rounds_run=self.rounds_run,
            residual={},
            epsilon=Fraction(0),
            support=self.support,
        )

    def marginal_capital(
        self, states: Union[str, Iterable[str], None] = None
    ) -> CappedPolynomial:
        """Capital distribution summed over rounds, optionally restricted to given absorbing states."""
        if states is None:
            wanted = None
        elif isinstance(states, str):
            wanted = {states}
        else:
            wanted = set(states)
        total = CappedPolynomial.zero(*self.support)
        for (_, state), poly in self.absorbed.items():
            if wanted is None or state in wanted:
                total = total + poly
        return total

    def marginal_rounds(self) -> dict[int, Fraction]:
        """Absorption-time distribution: round -> mass absorbed in that round."""
        masses: dict[int, Fraction] = {}
        for (round_index, _), poly in self.absorbed.items():
            masses[round_index] = masses.get(round_index, Fraction(0)) + poly.mass()
        return dict(sorted(masses.items()))


def run_absorption(
    chain: WeightedMarkovChain,
    start: str,
    rounds: int,
    initial_capital: Optional[int] = None,
) -> AbsorptionRecord:
    """Run `rounds` umbral steps from `start` and collect the full record.

    The walk starts with probability 1 in `start`, holding
    `initial_capital` units (default: 0 clamped into the support
    window).  Raises InvalidChainError for an unsound chain and
    ValueError for a bad start state or horizon.
    """
    violations = chain.validate()
    if violations:
        raise InvalidChainError(violations)
    if rounds < 1:
        raise ValueError(f"horizon must be >= 1, got {rounds}")
    if start not in chain.transient_set:
        raise ValueError(f"start state {start!r} is not a transient state")
    lo, hi = chain.support
    if initial_capital is None:
        initial_capital = min(max(0, lo), hi)
    vector: StateVector = {
        start: CappedPolynomial.monomial(initial_capital, 1, lo, hi)
    }
    absorbed: dict[tuple[int, str], CappedPolynomial] = {}
    for round_index in range(1, rounds + 1):
        vector, landed = umbra_step(chain, vector)
        for state, poly in landed.items():
            absorbed[(round_index, state)] = poly
    epsilon = sum((poly.mass() for poly in vector.values()), Fraction(0))
    return AbsorptionRecord(
        absorbed=absorbed,
        rounds_run=rounds,
        residual=vector,
        epsilon=epsilon,
        support=chain.support,
    )


def conditional_record(record: AbsorptionRecord) -> AbsorptionRecord:
    """Functional spelling of AbsorptionRecord.conditional()."""
    return record.conditional()


def marginal_capital(
    record: AbsorptionRecord, states: Union[str, Iterable[str], None] = None
) -> CappedPolynomial:
    """Functional spelling of AbsorptionRecord.marginal_capital()."""
    return record.marginal_capital(states)


def marginal_rounds(record: AbsorptionRecord) -> dict[int, Fraction]:
    """Functional spelling of AbsorptionRecord.marginal_rounds()."""
    return record.marginal_rounds()


def chain_to_json_dict(chain: WeightedMarkovChain) -> dict:
    """Plain-dict form of a chain; probabilities become "p/q" strings."""
    lo, hi = chain.support
    return {
        "transient": list(chain.transient),
        "absorbing": list(chain.absorbing),
        "edges": [
            {
                "src": edge.src,
                "dst": edge.dst,
                "prob": str(edge.prob),
                "weight": edge.weight,
            }
            for edge in chain.edges
        ],
        "support": {"min": lo, "max": hi},
    }


def dumps_chain(chain: WeightedMarkovChain, indent: int = 2) -> str:
    return json.dumps(chain_to_json_dict(chain), indent=indent) + "\n"


def _parse_prob(value: object, where: str) -> Fraction:
    # Floats are refused on purpose: a chain file is an exact artifact.
    if isinstance(value, bool) or isinstance(value, float):
        raise ChainFormatError(
            f"{where}: probability must be an exact \"p/q\" string or integer, "
            f"got {value!r}"
        )
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ChainFormatError(f"{where}: {exc}") from None
    raise ChainFormatError(f"{where}: probability has unsupported type {type(value).__name__}")


def chain_from_json_dict(data: object) -> WeightedMarkovChain:
    """Decode the plain-dict chain form; raises ChainFormatError on shape problems.

    Unknown keys (for example an advisory "start") are ignored, and
    chain invariants are deliberately not checked here; run validate()
    on the result when soundness matters.
    """
    if not isinstance(data, dict):
        raise ChainFormatError("chain document must be a JSON object")
    for key in ("transient", "absorbing", "edges", "support"):
        if key not in data:
            raise ChainFormatError(f"chain document is missing {key!r}")
    transient = data["transient"]
    absorbing = data["absorbing"]
    if not isinstance(transient, list) or not all(isinstance(s, str) for s in transient):
        raise ChainFormatError("'transient' must be a list of state ids")
    if not isinstance(absorbing, list) or not all(isinstance(s, str) for s in absorbing):
        raise ChainFormatError("'absorbing' must be a list of state ids")
    support = data["support"]
    if (
        not isinstance(support, dict)
        or not isinstance(support.get("min"), int)
        or not isinstance(support.get("max"), int)
        or isinstance(support.get("min"), bool)
        or isinstance(support.get("max"), bool)
    ):
        raise ChainFormatError("'support' must be an object with integer 'min' and 'max'")
    raw_edges = data["edges"]
    if not isinstance(raw_edges, list):
        raise ChainFormatError("'edges' must be a list")
    edges = []
    for index, item in enumerate(raw_edges):
        where = f"edges[{index}]"
        if not isinstance(item, dict):
            raise ChainFormatError(f"{where}: must be an object")
        for key in ("src", "dst", "prob", "weight"):
            if key not in item:
                raise ChainFormatError(f"{where}: missing {key!r}")
        if not isinstance(item["src"], str) or not isinstance(item["dst"], str):
            raise ChainFormatError(f"{where}: 'src' and 'dst' must be state ids")
        weight = item["weight"]
        if isinstance(weight, bool) or not isinstance(weight, int):
            raise ChainFormatError(f"{where}: 'weight' must be an integer")
        edges.append(
            Edge(
                src=item["src"],
                dst=item["dst"],
                prob=_parse_prob(item["prob"], f"{where}.prob"),
                weight=weight,
            )
        )
    return WeightedMarkovChain(
        transient=tuple(transient),
        absorbing=tuple(absorbing),
        edges=tuple(edges),
        support=(support["min"], support["max"]),
    )


def loads_chain(text: str) -> WeightedMarkovChain:
    """Decode a chain from JSON text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChainFormatError(f"invalid JSON: {exc}") from None
    return chain_from_json_dict(data)
