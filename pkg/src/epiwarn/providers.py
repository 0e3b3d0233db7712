"""Pluggable outbound/inbound adapters.

Live gateways (SMS, news feeds, weather APIs) are out of scope; these
providers speak the same interfaces from local files or a generic webhook so
the service stays self-contained and testable.
"""

from __future__ import annotations

import datetime as dt
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

import requests

from .exceptions import ProviderError, ProviderUnavailable
from .ingest import SourceKind, aggregate_daily_to_weekly, parse_source
from .weeks import Disease, WeekKey


class AlertProvider(Protocol):
    def send(self, to: str, message: str) -> None: ...


class FileAlertProvider:
    """Appends one structured line per message; the default provider."""

    def __init__(self, path, clock: Callable[[], float] = time.time):
        self.path = Path(path)
        self.clock = clock

    def send(self, to: str, message: str) -> None:
        line = json.dumps({"ts": self.clock(), "to": to, "message": message}, sort_keys=True)
        try:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
        except OSError as exc:
            raise ProviderError(f"cannot append to {self.path}: {exc}") from exc


class WebhookAlertProvider:
    """POSTs {to, message} as JSON; any non-2xx or transport failure is an error."""

    def __init__(self, url: str, timeout: float = 5.0):
        self.url = url
        self.timeout = timeout

    def send(self, to: str, message: str) -> None:
        try:
            resp = requests.post(self.url, json={"to": to, "message": message}, timeout=self.timeout)
        except requests.RequestException as exc:
            raise ProviderError(f"webhook transport error: {exc}") from exc
        if resp.status_code >= 400:
            raise ProviderError(f"webhook returned {resp.status_code}")


def dispatch_alert(provider: AlertProvider, recipient_phone: str, message: str) -> str:
    """Send with one retry; returns "sent" or raises ProviderError."""
    try:
        provider.send(recipient_phone, message)
        return "sent"
    except ProviderError:
        pass
    provider.send(recipient_phone, message)
    return "sent"


@dataclass(frozen=True)
class Headline:
    title: str
    source: str
    date: dt.date


class FixtureNewsProvider:
    """Reads headlines from a JSON file: [{title, source, date, disease}]."""

    def __init__(self, path):
        self.path = Path(path)

    def fetch(self, disease: Disease, now: dt.date) -> list[Headline]:
        """Headlines for the disease dated within the last 7 days of ``now``."""
        try:
            raw = json.loads(self.path.read_text(encoding="utf-8"))
            items = [
                Headline(
                    title=item["title"],
                    source=item["source"],
                    date=dt.date.fromisoformat(item["date"]),
                )
                for item in raw
                if item.get("disease") == disease.value
            ]
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ProviderUnavailable(f"news fixture unreadable: {exc}") from exc
        cutoff = now - dt.timedelta(days=7)
        return [h for h in items if cutoff <= h.date <= now]


class FixtureFeatureProvider:
    """Resolves non-clinical fields for a week from the ingest fixture files."""

    def __init__(self, weather_path=None, trends_path=None, tweets_path=None):
        self.weather_path = weather_path
        self.trends_path = trends_path
        self.tweets_path = tweets_path
        self._cache: dict[str, object] = {}

    def _load(self, kind: SourceKind, path):
        if path is None:
            raise ProviderUnavailable(f"no fixture configured for {kind.value}")
        key = f"{kind.value}:{path}"
        if key not in self._cache:
            try:
                content = Path(path).read_text(encoding="utf-8")
            except OSError as exc:
                raise ProviderUnavailable(f"cannot read {path}: {exc}") from exc
            self._cache[key] = parse_source(kind, content)
        return self._cache[key]

    def resolve(self, disease: Disease, week: WeekKey) -> dict[str, float | int]:
        """All four non-clinical fields for the week, or ProviderUnavailable."""
        weekly = aggregate_daily_to_weekly(self._load(SourceKind.WEATHER_DAILY, self.weather_path))
        weather = {w.week: w for w in weekly}
        if week not in weather:
            raise ProviderUnavailable(f"no weather data for {week}")
        trends = [
            r
            for r in self._load(SourceKind.SEARCH_TRENDS_WEEKLY, self.trends_path)
            if r.disease == disease and r.week == week
        ]
        if not trends:
            raise ProviderUnavailable(f"no search trends for {week}")
        wanted = {"flu", "influenza"} if disease == Disease.INFLUENZA else {disease.value}
        counts = {
            r.keyword: r.count
            for r in self._load(SourceKind.TWEET_COUNTS_WEEKLY, self.tweets_path)
            if r.week == week and r.keyword in wanted
        }
        if set(counts) != wanted:
            raise ProviderUnavailable(f"incomplete tweet counts for {week}")
        return {
            "precipitation": weather[week].precipitation,
            "temperature": weather[week].temperature,
            "search_volume": trends[0].volume,
            "tweet_count": sum(counts.values()),
        }
