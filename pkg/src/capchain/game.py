"""Chick-counting race games: data model, parsing, rules, and compilation.

The game is played on a row of squares.  Square 1 is the start; every
other square is empty, labeled with one animal, or the terminal square
(always last, matching every animal).  A spinner with one face per
animal plus a fox drives the piece.  An animal outcome moves the piece
forward to the next square matching that animal and collects one chick
per square moved, plus a bonus chick when the landing square is blue.
The fox outcome costs one chick (never dropping below zero) and does
not move the piece.  The game ends on the terminal square and is won
with at least `win_threshold` chicks.

`compile_game` turns a GameSpec into a WeightedMarkovChain whose edge
weights are chick gains, so the exact absorption machinery applies
as-is: the fox is a weight −1 self-loop and the chick cap is the
capital window's upper clamp.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .chain import Edge, WeightedMarkovChain

EMPTY = "0"
TERMINAL = "*"

_RESERVED_TAGS = {EMPTY, TERMINAL}


class GameSpecError(ValueError):
    """A game document failed to parse or validate; carries all diagnostics."""

    def __init__(self, diagnostics: Iterable[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass(frozen=True)
class GameSpec:
    """A validated-shape game board.

    `squares` holds the labels of squares 1..N+1 (1-based board
    positions), terminal last.  Square 1 is the start; any label on it
    is ignored, because no spin ever lands there.  `win_threshold` is
    N, the chick count needed to win, and also the capital cap.
    """

    animals: tuple[str, ...]
    squares: tuple[str, ...]
    blue: frozenset[int]
    win_threshold: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "animals", tuple(self.animals))
        object.__setattr__(self, "squares", tuple(self.squares))
        object.__setattr__(self, "blue", frozenset(int(b) for b in self.blue))
        object.__setattr__(self, "win_threshold", int(self.win_threshold))

    @property
    def terminal_square(self) -> int:
        return self.win_threshold + 1

    def label(self, square: int) -> str:
        return self.squares[square - 1]

    def validate(self) -> list[str]:
        """Return diagnostics with board positions, empty when the game is sound."""
        diagnostics: list[str] = []
        if not self.animals:
            diagnostics.append("animals: at least one tag is required")
        seen: set[str] = set()
        for tag in self.animals:
            if not tag or tag in _RESERVED_TAGS:
                diagnostics.append(f"animals: {tag!r} is not a usable tag")
            elif tag in seen:
                diagnostics.append(f"animals: duplicate tag {tag!r}")
            seen.add(tag)
        if self.win_threshold < 1:
            diagnostics.append(f"win_threshold must be >= 1, got {self.win_threshold}")
        if len(self.squares) < 2:
            diagnostics.append("board must have at least a start and a terminal square")
        if self.squares and self.squares[-1] != TERMINAL:
            diagnostics.append("missing terminal: the last square must be '*'")
        for position, label in enumerate(self.squares[:-1], start=1):
            if label == TERMINAL:
                diagnostics.append(
                    f"square {position}: terminal marker before the last square"
                )
            elif label != EMPTY and label not in seen:
                diagnostics.append(f"square {position}: unknown animal tag {label!r}")
        if self.squares and len(self.squares) != self.win_threshold + 1:
            diagnostics.append(
                f"wrong square count: board has {len(self.squares)} squares, "
                f"win_threshold {self.win_threshold} needs {self.win_threshold + 1}"
            )
        upper = self.win_threshold + 1
        for square in sorted(self.blue):
            if not 2 <= square <= upper:
                diagnostics.append(f"blue square {square} is outside 2..{upper}")
        return diagnostics

    def matches(self, square: int, animal: str) -> bool:
        """True when the square's label matches the animal (terminal matches all)."""
        label = self.label(square)
        return label == TERMINAL or label == animal

    def next_location(self, square: int, animal: str) -> int:
        """Smallest j > square matching `animal`; the terminal guarantees one exists."""
        if animal not in self.animals:
            raise ValueError(f"unknown animal tag {animal!r}")
        if square == self.terminal_square:
            raise ValueError("cannot move from the terminal square")
        if not 1 <= square <= self.win_threshold:
            raise ValueError(
                f"square {square} is outside the board (1..{self.terminal_square})"
            )
        for target in range(square + 1, self.terminal_square + 1):
            if self.matches(target, animal):
                return target
        raise ValueError(f"no square after {square} matches {animal!r}")

    def chick_gain(self, src: int, dst: int) -> int:
        """Chicks collected moving src -> dst: squares moved, plus 1 on a blue landing."""
        return dst - src + (1 if dst in self.blue else 0)


def next_location(spec: GameSpec, square: int, animal: str) -> int:
    """Functional spelling of GameSpec.next_location()."""
    return spec.next_location(square, animal)


def chick_gain(spec: GameSpec, src: int, dst: int) -> int:
    """Functional spelling of GameSpec.chick_gain()."""
    return spec.chick_gain(src, dst)


def parse_game_spec(source: Union[str, Mapping]) -> GameSpec:
    """Parse and validate a game document (JSON text or an equivalent mapping).

    The board is a list of per-square labels, or one comma-separated
    string.  The terminal "*" may be left implicit (it is appended) or
    written explicitly as the last entry.  `win_threshold` defaults to
    the number of playable squares, i.e. the board length without the
    terminal.  Raises GameSpecError carrying every diagnostic found.
    """
    if isinstance(source, str):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise GameSpecError([f"invalid JSON: {exc}"]) from None
    else:
        data = source
    if not isinstance(data, Mapping):
        raise GameSpecError(["game document must be a JSON object"])

    shape: list[str] = []
    animals = data.get("animals")
    if not isinstance(animals, list) or not all(isinstance(a, str) for a in animals):
        shape.append("animals: must be a list of tag strings")
        animals = []
    board = data.get("board")
    if isinstance(board, str):
        board = [entry.strip() for entry in board.split(",")]
    if not isinstance(board, list) or not all(isinstance(s, str) for s in board):
        shape.append("board: must be a list of square labels or one comma-separated string")
        board = []
    blue = data.get("blue", [])
    if (
        not isinstance(blue, list)
        or not all(isinstance(b, int) and not isinstance(b, bool) for b in blue)
    ):
        shape.append("blue: must be a list of square numbers")
        blue = []
    if shape:
        raise GameSpecError(shape)

    if TERMINAL not in board:
        board = board + [TERMINAL]
    threshold = data.get("win_threshold", len(board) - 1)
    if isinstance(threshold, bool) or not isinstance(threshold, int):
        raise GameSpecError(["win_threshold: must be an integer"])

    spec = GameSpec(
        animals=tuple(animals),
        squares=tuple(board),
        blue=frozenset(blue),
        win_threshold=threshold,
    )
    diagnostics = spec.validate()
    if diagnostics:
        raise GameSpecError(diagnostics)
    return spec


SIMPLIFIED_GAME_JSON = """\
{
  "animals": ["C", "S"],
  "board": ["0", "0", "S", "C", "0", "C", "0", "S"],
  "blue": [3, 6]
}
"""

FULL_GAME_JSON = """\
{
  "animals": ["C", "D", "P", "S", "T"],
  "board": ["0", "0", "S", "P", "T", "C", "D", "P", "C", "D",
            "S", "T", "0", "C", "P", "0", "0", "0", "T", "0",
            "T", "D", "S", "C", "D", "P", "T", "0", "S", "C",
            "0", "0", "T", "P", "S", "D", "0", "S", "C", "P"],
  "blue": [5, 9, 23, 36, 40]
}
"""

_BUILTIN_GAMES = {
    "simplified": SIMPLIFIED_GAME_JSON,
    "full": FULL_GAME_JSON,
}


def builtin_game(name: str) -> GameSpec:
    """One of the two shipped boards: "simplified" (N=8, K=2) or "full" (N=40, K=5)."""
    try:
        text = _BUILTIN_GAMES[name]
    except KeyError:
        raise ValueError(
            f"unknown builtin game {name!r}; expected one of {sorted(_BUILTIN_GAMES)}"
        ) from None
    return parse_game_spec(text)


def compile_game(
    spec: GameSpec,
    merge_parallel: bool = True,
    prune_unreachable: bool = False,
) -> WeightedMarkovChain:
    """Compile a game into a weighted chain over its non-empty squares.

    States are square numbers as strings: the start plus every labeled
    square is transient, the terminal is the single absorbing state.
    Each transient square carries the fox self-loop (weight −1) first,
    then one edge per animal in declared order; with merge_parallel,
    animal edges landing on the same (square, gain) pair are merged by
    summing their probabilities.  The capital window is [0, N], so the
    upper clamp realises the "at least N chicks" win cap.
    """
    violations = spec.validate()
    if violations:
        raise GameSpecError(violations)
    terminal = spec.terminal_square
    squares = [1] + [
        i for i in range(2, terminal) if spec.label(i) != EMPTY
    ]
    if prune_unreachable:
        reachable = {1}
        frontier = [1]
        while frontier:
            here = frontier.pop()
            for animal in spec.animals:
                target = spec.next_location(here, animal)
                if target != terminal and target not in reachable:
                    reachable.add(target)
                    frontier.append(target)
        squares = [i for i in squares if i in reachable]

    prob = Fraction(1, len(spec.animals) + 1)
    edges: list[Edge] = []
    for square in squares:
        src = str(square)
        edges.append(Edge(src=src, dst=src, prob=prob, weight=-1))
        landing: dict[tuple[int, int], Fraction] = {}
        for animal in spec.animals:
            target = spec.next_location(square, animal)
            key = (target, spec.chick_gain(square, target))
            if merge_parallel:
                landing[key] = landing.get(key, Fraction(0)) + prob
            else:
                edges.append(Edge(src=src, dst=str(target), prob=prob, weight=key[1]))
        for (target, gain), total in landing.items():
            edges.append(Edge(src=src, dst=str(target), prob=total, weight=gain))
    return WeightedMarkovChain(
        transient=tuple(str(i) for i in squares),
        absorbing=(str(terminal),),
        edges=tuple(edges),
        support=(0, spec.win_threshold),
    )
