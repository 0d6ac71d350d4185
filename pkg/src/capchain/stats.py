"""Summary statistics of an absorption record, exact until presentation.

Every moment is assembled from exact Fractions: means, variances,
covariance, and the win probability stay rational end to end.  Only
skewness, kurtosis, and correlation involve square roots, so those are
evaluated as high-precision Decimals from the exact central moments.
Rendering (fixed-point strings, banker's rounding) is the last step
and never feeds back into arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_EVEN, localcontext
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .chain import AbsorptionRecord

# Working precision for the few irrational statistics; far beyond the
# 13-ish digits ever rendered, so display values are correctly rounded.
DECIMAL_PRECISION = 50


@dataclass(frozen=True)
class SummaryStats:
    """Conditional-on-absorption statistics of one absorption run.

    Rational statistics are exact Fractions.  The root-bearing ones
    (skewness, kurtosis, correlation) are Decimals, or None when the
    relevant variance vanishes.  `epsilon` is the unconditioned
    leftover mass of the run the statistics were extracted from.
    """

    win_probability: Fraction
    chick_mean: Fraction
    chick_variance: Fraction
    chick_skewness: Optional[Decimal]
    chick_kurtosis_raw: Optional[Decimal]
    chick_kurtosis_excess: Optional[Decimal]
    rounds_mean: Fraction
    rounds_variance: Fraction
    covariance: Fraction
    correlation: Optional[Decimal]
    epsilon: Fraction
    win_capital: int
    rounds_run: int


def distribution_moments(
    pairs: Iterable[tuple[int, Fraction]], upto: int = 4
) -> list[Fraction]:
    """Raw power moments of a (value, mass) distribution for orders 0..upto."""
    moments = [Fraction(0)] * (upto + 1)
    for value, mass in pairs:
        power = Fraction(1)
        for order in range(upto + 1):
            moments[order] += power * mass
            power *= value
    return moments


def central_moments(raw: Sequence[Fraction]) -> tuple[Fraction, Fraction, Fraction]:
    """Central moments (m2, m3, m4) from raw moments of a unit-mass distribution."""
    if raw[0] != 1:
        raise ValueError(f"raw moments describe mass {raw[0]}, expected exactly 1")
    mean = raw[1]
    m2 = raw[2] - mean**2
    m3 = raw[3] - 3 * mean * raw[2] + 2 * mean**3
    m4 = raw[4] - 4 * mean * raw[3] + 6 * mean**2 * raw[2] - 3 * mean**4
    return m2, m3, m4


def _to_decimal(value: Fraction) -> Decimal:
    return Decimal(value.numerator) / Decimal(value.denominator)


def summarize(record: AbsorptionRecord, win_capital: int) -> SummaryStats:
    """Extract all summary statistics, conditioning on absorption first.

    `win_capital` is the capital level that counts as a win (the upper
    clamp for a compiled game).  Raises ValueError when the record
    absorbed no mass at all, because conditioning is then undefined.
    """
    cond = record.conditional()
    capital = cond.marginal_capital()
    raw_capital = [capital.power_moment(order) for order in range(5)]
    rounds = cond.marginal_rounds()
    raw_rounds = distribution_moments(rounds.items(), upto=2)

    m2_c, m3_c, m4_c = central_moments(raw_capital)
    rounds_mean = raw_rounds[1]
    rounds_variance = raw_rounds[2] - rounds_mean**2
    cross = sum(
        (
            round_index * poly.power_moment(1)
            for (round_index, _), poly in cond.absorbed.items()
        ),
        Fraction(0),
    )
    covariance = cross - rounds_mean * raw_capital[1]

    with localcontext() as ctx:
        ctx.prec = DECIMAL_PRECISION
        skewness = kurtosis_raw = kurtosis_excess = correlation = None
        if m2_c > 0:
            sigma2 = _to_decimal(m2_c)
            skewness = _to_decimal(m3_c) / (sigma2 * sigma2.sqrt())
            kurtosis_raw = _to_decimal(m4_c) / _to_decimal(m2_c**2)
            kurtosis_excess = kurtosis_raw - 3
        if m2_c > 0 and rounds_variance > 0:
            correlation = _to_decimal(covariance) / _to_decimal(
                m2_c * rounds_variance
            ).sqrt()

    return SummaryStats(
        win_probability=capital.coefficient(win_capital),
        chick_mean=raw_capital[1],
        chick_variance=m2_c,
        chick_skewness=skewness,
        chick_kurtosis_raw=kurtosis_raw,
        chick_kurtosis_excess=kurtosis_excess,
        rounds_mean=rounds_mean,
        rounds_variance=rounds_variance,
        covariance=covariance,
        correlation=correlation,
        epsilon=record.epsilon,
        win_capital=win_capital,
        rounds_run=record.rounds_run,
    )


def format_fraction(value: Fraction, digits: int) -> str:
    """Correctly rounded fixed-point string with `digits` places (ties to even)."""
    if digits < 1:
        raise ValueError(f"digits must be >= 1, got {digits}")
    negative = value < 0
    scaled = abs(value) * 10**digits
    units, remainder = divmod(scaled.numerator, scaled.denominator)
    twice = 2 * remainder
    if twice > scaled.denominator or (twice == scaled.denominator and units % 2):
        units += 1
    text = str(units).rjust(digits + 1, "0")
    sign = "-" if negative and units else ""
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def format_fraction_scientific(value: Fraction, digits: int) -> str:
    """Scientific-notation string with `digits` significant digits."""
    if digits < 1:
        raise ValueError(f"digits must be >= 1, got {digits}")
    if value == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(value.numerator) / Decimal(value.denominator))


def _format_decimal(value: Decimal, digits: int) -> str:
    quantum = Decimal(1).scaleb(-digits)
    return str(value.quantize(quantum, rounding=ROUND_HALF_EVEN))


_UNDEFINED = "undefined (zero variance)"


def _decimal_pair(value: Fraction, digits: int) -> dict:
    return {"decimal": format_fraction(value, digits), "fraction": str(value)}


def stats_json_dict(stats: SummaryStats, digits: int = 13) -> dict:
    """Plain-dict report; rationals carry both a decimal and an exact fraction form."""

    def optional(value: Optional[Decimal]) -> Optional[str]:
        return None if value is None else _format_decimal(value, digits)

    return {
        "win_probability": _decimal_pair(stats.win_probability, digits),
        "chicks": {
            "mean": _decimal_pair(stats.chick_mean, digits),
            "variance": _decimal_pair(stats.chick_variance, digits),
            "skewness": optional(stats.chick_skewness),
            "kurtosis_raw": optional(stats.chick_kurtosis_raw),
            "kurtosis_excess": optional(stats.chick_kurtosis_excess),
        },
        "rounds": {
            "mean": _decimal_pair(stats.rounds_mean, digits),
            "variance": _decimal_pair(stats.rounds_variance, digits),
        },
        "correlation": optional(stats.correlation),
        "epsilon": {
            "decimal": format_fraction_scientific(stats.epsilon, digits),
            "fraction": str(stats.epsilon),
        },
        "M": stats.rounds_run,
    }


def render_stats(stats: SummaryStats, digits: int = 13, fmt: str = "text") -> str:
    """Render a report as aligned text or as the JSON document."""
    if fmt == "json":
        return json.dumps(stats_json_dict(stats, digits), indent=2) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}; expected 'text' or 'json'")

    def fixed(value: Fraction) -> str:
        return format_fraction(value, digits)

    def rooted(value: Optional[Decimal]) -> str:
        return _UNDEFINED if value is None else _format_decimal(value, digits)

    rows = [
        ("horizon M", str(stats.rounds_run)),
        ("win capital", str(stats.win_capital)),
        ("win probability", fixed(stats.win_probability)),
        ("chick mean", fixed(stats.chick_mean)),
        ("chick variance", fixed(stats.chick_variance)),
        ("chick skewness", rooted(stats.chick_skewness)),
        ("chick kurtosis (raw)", rooted(stats.chick_kurtosis_raw)),
        ("chick kurtosis (excess)", rooted(stats.chick_kurtosis_excess)),
        ("rounds mean", fixed(stats.rounds_mean)),
        ("rounds variance", fixed(stats.rounds_variance)),
        ("covariance", fixed(stats.covariance)),
        ("correlation", rooted(stats.correlation)),
        ("epsilon", format_fraction_scientific(stats.epsilon, digits)),
    ]
    width = max(len(label) for label, _ in rows)
    return "".join(f"{label.ljust(width)}  {value}\n" for label, value in rows)
