"""ISO-week keyed weekly series: the temporal data model everything shares."""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from enum import Enum
from functools import total_ordering
from typing import Iterable, Iterator

from .exceptions import EmptyInput, ShapeMismatch


class Disease(str, Enum):
    INFLUENZA = "influenza"
    MALARIA = "malaria"
    HEPATITIS = "hepatitis"

    @classmethod
    def parse(cls, text: str) -> "Disease":
        try:
            return cls(text.strip().lower())
        except ValueError:
            from .exceptions import UnknownDisease

            raise UnknownDisease(f"unknown disease {text!r}") from None


@total_ordering
@dataclass(frozen=True)
class WeekKey:
    """One ISO-8601 week (year + week number, 1-53).

    Total ordering and a successor that is correct across year boundaries,
    including 53-week ISO years.
    """

    iso_year: int
    iso_week: int

    def __post_init__(self):
        # fromisocalendar rejects week numbers the year does not have.
        try:
            dt.date.fromisocalendar(self.iso_year, self.iso_week, 1)
        except ValueError as exc:
            raise ShapeMismatch(f"invalid ISO week {self.iso_year}-W{self.iso_week:02d}: {exc}") from None

    def start_date(self) -> dt.date:
        """Monday of this ISO week."""
        return dt.date.fromisocalendar(self.iso_year, self.iso_week, 1)

    def next(self) -> "WeekKey":
        return WeekKey.from_date(self.start_date() + dt.timedelta(days=7))

    @classmethod
    def from_date(cls, day: dt.date) -> "WeekKey":
        iso = day.isocalendar()
        return cls(iso[0], iso[1])

    @classmethod
    def parse(cls, text: str) -> "WeekKey":
        """Parse the ``YYYY-Www`` form, e.g. ``2021-W07``."""
        try:
            year_s, week_s = text.split("-W")
            return cls(int(year_s), int(week_s))
        except (ValueError, AttributeError):
            raise ShapeMismatch(f"cannot parse week key {text!r}") from None

    def __str__(self) -> str:
        return f"{self.iso_year}-W{self.iso_week:02d}"

    def __lt__(self, other: "WeekKey") -> bool:
        return (self.iso_year, self.iso_week) < (other.iso_year, other.iso_week)


@dataclass(frozen=True)
class WeeklySeries:
    """Gapless weekly observations of one variable for one disease.

    Construction enforces the invariants: consecutive ISO weeks (every key is
    the successor of the previous one) and finite, non-negative values.
    """

    disease: Disease
    points: tuple[tuple[WeekKey, float], ...]

    def __post_init__(self):
        pts = tuple((wk, float(v)) for wk, v in self.points)
        if not pts:
            raise EmptyInput("a WeeklySeries needs at least one point")
        prev = None
        for wk, v in pts:
            if not math.isfinite(v):
                raise ShapeMismatch(f"non-finite value at {wk}")
            if v < 0:
                raise ShapeMismatch(f"negative value {v} at {wk}")
            if prev is not None and wk != prev.next():
                raise ShapeMismatch(f"week {wk} does not follow {prev} (gap or disorder)")
            prev = wk
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_values(cls, disease: Disease, start: WeekKey, values: Iterable[float]) -> "WeeklySeries":
        pts = []
        wk = start
        for v in values:
            pts.append((wk, float(v)))
            wk = wk.next()
        return cls(disease, tuple(pts))

    def values(self) -> list[float]:
        return [v for _, v in self.points]

    def weeks(self) -> list[WeekKey]:
        return [wk for wk, _ in self.points]

    def last_week(self) -> WeekKey:
        return self.points[-1][0]

    def slice(self, start: int, stop: int) -> "WeeklySeries":
        return WeeklySeries(self.disease, self.points[start:stop])

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[tuple[WeekKey, float]]:
        return iter(self.points)
