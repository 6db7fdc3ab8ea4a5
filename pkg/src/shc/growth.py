"""Periodic-point counts and their exponential-rate ratios.

Counts are Python ints (arbitrary precision) and ratios ``count(n) / r**n``
are exact :class:`fractions.Fraction` values, so no comparison in the
divergence check is subject to overflow or rounding.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Context, Decimal
from fractions import Fraction

from .errors import InvalidInputError, InvalidParameterError

_DISPLAY = Context(prec=17)


def to_decimal(x: Fraction) -> Decimal:
    """17-significant-digit decimal rendering of an exact ratio."""
    return _DISPLAY.divide(Decimal(x.numerator), Decimal(x.denominator))


@dataclass
class GrowthTable:
    counts: dict[int, int]
    ratios: dict[tuple[int, float], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.counts = {int(n): int(c) for n, c in sorted(self.counts.items())}
        if any(c < 0 for c in self.counts.values()):
            raise InvalidInputError("counts must be nonnegative")

    @property
    def periods(self) -> list[int]:
        return list(self.counts)

    def ratio(self, n: int, r) -> Fraction:
        key = (n, float(r))
        if key not in self.ratios:
            self.ratios[key] = Fraction(self.counts[n]) / Fraction(r) ** n
        return self.ratios[key]


@dataclass(frozen=True)
class RateReport:
    r: float
    periods: tuple[int, ...]
    ratios: tuple[Fraction, ...]
    running_min: tuple[Fraction, ...]
    divergent: bool


def growth_report(table: GrowthTable, r_list) -> list[RateReport]:
    """Finite-range lower-limit proxy for ``count(n) / r**n``.

    ``running_min[i]`` is the minimum of the ratios from ``periods[i]`` onward;
    ``divergent`` is True iff that suffix minimum strictly increases.
    """
    if not table.counts:
        raise InvalidInputError("growth report needs a nonempty table")
    out = []
    periods = tuple(table.periods)
    for r in r_list:
        if not float(r) > 1.0:
            raise InvalidParameterError(f"rate r must be > 1, got {r}")
        ratios = tuple(table.ratio(n, r) for n in periods)
        suffix = list(ratios)
        for i in range(len(suffix) - 2, -1, -1):
            suffix[i] = min(suffix[i], suffix[i + 1])
        divergent = len(suffix) > 1 and all(a < b for a, b in zip(suffix, suffix[1:]))
        out.append(RateReport(float(r), periods, ratios, tuple(suffix), divergent))
    return out
