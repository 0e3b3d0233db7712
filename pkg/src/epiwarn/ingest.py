"""File adapters for the four weekly data sources, plus merge and validation.

Formats are strict comma-separated text with a fixed header (documented in
docs/formats.md). Daily weather is averaged into ISO weeks; the four sources
are aligned on week keys over their overlapping span; single-week gaps are
forward-filled and anything longer is an operator problem.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from enum import Enum

from .exceptions import DiseaseMismatch, DuplicateWeek, GapTooLong, ParseError, UnknownDisease
from .weeks import Disease, WeekKey


class SourceKind(str, Enum):
    WEATHER_DAILY = "weather_daily"
    SEARCH_TRENDS_WEEKLY = "search_trends_weekly"
    TWEET_COUNTS_WEEKLY = "tweet_counts_weekly"
    INCIDENCE_WEEKLY = "incidence_weekly"


HEADERS = {
    SourceKind.WEATHER_DAILY: "date,tavg_c,prcp_mm",
    SourceKind.SEARCH_TRENDS_WEEKLY: "week_start,disease,volume",
    SourceKind.TWEET_COUNTS_WEEKLY: "week_start,keyword,count",
    SourceKind.INCIDENCE_WEEKLY: "week_start,disease,cases",
}

TWEET_KEYWORDS = {"flu", "influenza", "malaria", "hepatitis"}


@dataclass(frozen=True)
class WeatherDaily:
    date: dt.date
    tavg_c: float
    prcp_mm: float


@dataclass(frozen=True)
class WeeklyWeather:
    week: WeekKey
    temperature: float
    precipitation: float
    days: int
    partial: bool


@dataclass(frozen=True)
class TrendsWeekly:
    week: WeekKey
    disease: Disease
    volume: float


@dataclass(frozen=True)
class TweetWeekly:
    week: WeekKey
    keyword: str
    count: int


@dataclass(frozen=True)
class IncidenceWeekly:
    week: WeekKey
    disease: Disease
    cases: int


@dataclass(frozen=True)
class MergedWeek:
    week: WeekKey
    precipitation: float
    temperature: float
    search_volume: float
    tweet_count: int
    cases: int
    imputed: bool = False


@dataclass(frozen=True)
class GapWeek:
    """A week inside the merge span with at least one source missing."""

    week: WeekKey
    present: dict
    missing: frozenset


def _parse_date(text: str, line: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise ParseError(line, f"bad date {text!r}") from None


def _parse_week_start(text: str, line: int) -> WeekKey:
    day = _parse_date(text, line)
    if day.isoweekday() != 1:
        raise ParseError(line, f"week_start {text!r} is not a Monday")
    return WeekKey.from_date(day)


def _parse_float(text: str, line: int, field: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(line, f"bad {field} {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(line, f"non-finite {field}")
    return value


def _parse_count(text: str, line: int, field: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ParseError(line, f"bad {field} {text!r}") from None
    if value < 0:
        raise ParseError(line, f"negative {field}")
    return value


def parse_source(kind: SourceKind, content: str) -> list:
    """Parse one source file into typed rows; line numbers include the header."""
    lines = content.splitlines()
    if not lines or lines[0].strip() != HEADERS[kind]:
        raise ParseError(1, f"expected header {HEADERS[kind]!r}")
    rows = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        fields = [f.strip() for f in raw.split(",")]
        if len(fields) != 3:
            raise ParseError(lineno, f"expected 3 fields, got {len(fields)}")
        if kind == SourceKind.WEATHER_DAILY:
            rows.append(
                WeatherDaily(
                    date=_parse_date(fields[0], lineno),
                    tavg_c=_parse_float(fields[1], lineno, "tavg_c"),
                    prcp_mm=_parse_float(fields[2], lineno, "prcp_mm"),
                )
            )
        elif kind == SourceKind.SEARCH_TRENDS_WEEKLY:
            volume = _parse_float(fields[2], lineno, "volume")
            if not (0.0 <= volume <= 100.0):
                raise ParseError(lineno, f"volume {volume} outside 0-100")
            rows.append(
                TrendsWeekly(
                    week=_parse_week_start(fields[0], lineno),
                    disease=Disease.parse(fields[1]),
                    volume=volume,
                )
            )
        elif kind == SourceKind.TWEET_COUNTS_WEEKLY:
            keyword = fields[1].lower()
            if keyword not in TWEET_KEYWORDS:
                raise UnknownDisease(f"line {lineno}: unknown keyword {fields[1]!r}")
            rows.append(
                TweetWeekly(
                    week=_parse_week_start(fields[0], lineno),
                    keyword=keyword,
                    count=_parse_count(fields[2], lineno, "count"),
                )
            )
        else:
            rows.append(
                IncidenceWeekly(
                    week=_parse_week_start(fields[0], lineno),
                    disease=Disease.parse(fields[1]),
                    cases=_parse_count(fields[2], lineno, "cases"),
                )
            )
    return rows


def aggregate_daily_to_weekly(daily: list[WeatherDaily]) -> list[WeeklyWeather]:
    """Group by ISO week; temperature and precipitation are means of the
    available days. Weeks with fewer than 4 days are flagged partial, not
    dropped."""
    buckets: dict[WeekKey, list[WeatherDaily]] = {}
    for row in daily:
        buckets.setdefault(WeekKey.from_date(row.date), []).append(row)
    out = []
    for week in sorted(buckets):
        rows = buckets[week]
        out.append(
            WeeklyWeather(
                week=week,
                temperature=sum(r.tavg_c for r in rows) / len(rows),
                precipitation=sum(r.prcp_mm for r in rows) / len(rows),
                days=len(rows),
                partial=len(rows) < 4,
            )
        )
    return out


def _keyed(rows, label: str) -> dict:
    out = {}
    for row in rows:
        if row.week in out:
            raise DuplicateWeek(f"duplicate {label} week {row.week}")
        out[row.week] = row
    return out


def _tweet_totals(disease: Disease, tweets: list[TweetWeekly]) -> dict[WeekKey, int]:
    """Weekly totals for the disease's keywords.

    Influenza sums the flu and influenza counts; a week missing either keyword
    row counts as missing tweet data for that week.
    """
    wanted = {"flu", "influenza"} if disease == Disease.INFLUENZA else {disease.value}
    per_keyword: dict[str, dict[WeekKey, int]] = {k: {} for k in wanted}
    for row in tweets:
        if row.keyword not in wanted:
            continue
        bucket = per_keyword[row.keyword]
        if row.week in bucket:
            raise DuplicateWeek(f"duplicate tweet week {row.week} for {row.keyword!r}")
        bucket[row.week] = row.count
    complete = set.intersection(*(set(b) for b in per_keyword.values())) if per_keyword else set()
    return {week: sum(per_keyword[k][week] for k in wanted) for week in complete}


def merge_weekly(
    disease: Disease,
    weather: list[WeeklyWeather],
    trends: list[TrendsWeekly],
    tweets: list[TweetWeekly],
    incidence: list[IncidenceWeekly],
) -> list[MergedWeek | GapWeek]:
    """Align the four sources on week keys over their overlapping span.

    Weeks with all fields present become MergedWeek; weeks missing any source
    become GapWeek records for validation to resolve.
    """
    for row in trends:
        if row.disease != disease:
            raise DiseaseMismatch(f"trends row for {row.disease.value} in a {disease.value} merge")
    for row in incidence:
        if row.disease != disease:
            raise DiseaseMismatch(f"incidence row for {row.disease.value} in a {disease.value} merge")

    weather_map = _keyed(weather, "weather")
    trends_map = _keyed(trends, "trends")
    incidence_map = _keyed(incidence, "incidence")
    tweet_map = _tweet_totals(disease, tweets)

    sources = [weather_map, trends_map, tweet_map, incidence_map]
    if any(not s for s in sources):
        return []
    start = max(min(s) for s in sources)
    stop = min(max(s) for s in sources)
    if stop < start:
        return []

    out: list[MergedWeek | GapWeek] = []
    week = start
    while week <= stop:
        present: dict = {}
        missing = set()
        if week in weather_map:
            present["precipitation"] = weather_map[week].precipitation
            present["temperature"] = weather_map[week].temperature
        else:
            missing.update(("precipitation", "temperature"))
        if week in trends_map:
            present["search_volume"] = trends_map[week].volume
        else:
            missing.add("search_volume")
        if week in tweet_map:
            present["tweet_count"] = tweet_map[week]
        else:
            missing.add("tweet_count")
        if week in incidence_map:
            present["cases"] = incidence_map[week].cases
        else:
            missing.add("cases")
        if missing:
            out.append(GapWeek(week=week, present=present, missing=frozenset(missing)))
        else:
            out.append(MergedWeek(week=week, **present))
        week = week.next()
    return out


FIELD_NAMES = ("precipitation", "temperature", "search_volume", "tweet_count", "cases")


def validate_and_impute(merged: list[MergedWeek | GapWeek]) -> list[MergedWeek]:
    """Resolve gap records by forward fill, one week at most.

    A gap week takes any missing field from the previous (resolved) week and
    is flagged imputed. Two consecutive incomplete weeks raise GapTooLong; a
    leading gap has nothing to fill from and also raises. Weeks absent from
    the input entirely (a jump in keys) are treated as gaps of their own, so
    no week outside [first, last] is ever invented.
    """
    if not merged:
        return []
    out: list[MergedWeek] = []
    prev_week: WeekKey | None = None
    prev_was_gap = False
    expected: WeekKey | None = None
    queue = list(merged)
    idx = 0
    while idx < len(queue):
        record = queue[idx]
        week = record.week
        if prev_week is not None:
            if week <= prev_week:
                raise DuplicateWeek(f"week {week} repeats or precedes {prev_week}")
            if week != expected:
                # a hole in the key sequence: synthesize gap records for it
                queue[idx:idx] = [GapWeek(week=expected, present={}, missing=frozenset(FIELD_NAMES))]
                continue
        if isinstance(record, MergedWeek):
            out.append(record)
            prev_was_gap = False
        else:
            if prev_was_gap or not out:
                raise GapTooLong(week)
            prev = out[-1]
            values = {name: record.present.get(name, getattr(prev, name)) for name in FIELD_NAMES}
            out.append(MergedWeek(week=week, imputed=True, **values))
            prev_was_gap = True
        prev_week = week
        expected = week.next()
        idx += 1
    return out
