"""Application configuration: one JSON file plus EPIWARN_* environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

DEFAULT_MEDICINES: dict[str, list[str]] = {
    "influenza": ["oseltamivir", "zanamivir", "paracetamol", "oral rehydration salts"],
    "malaria": ["artemether-lumefantrine", "chloroquine", "primaquine"],
    "hepatitis": ["tenofovir", "entecavir", "ribavirin"],
}

_ENV_OVERRIDES = {
    "EPIWARN_STORE_PATH": ("store_path", str),
    "EPIWARN_ARTIFACTS_DIR": ("artifacts_dir", str),
    "EPIWARN_HOST": ("host", str),
    "EPIWARN_PORT": ("port", int),
    "EPIWARN_ALERT_PROVIDER": ("alert_provider", str),
    "EPIWARN_ALERT_LOG_PATH": ("alert_log_path", str),
    "EPIWARN_WEBHOOK_URL": ("webhook_url", str),
    "EPIWARN_NEWS_PATH": ("news_path", str),
    "EPIWARN_TOKEN_TTL_SECONDS": ("token_ttl_seconds", float),
}


@dataclass(frozen=True)
class AppConfig:
    store_path: str = "epiwarn.db"
    artifacts_dir: str = "artifacts"
    host: str = "127.0.0.1"
    port: int = 8000
    alert_provider: str = "file"  # "file" or "webhook"
    alert_log_path: str = "alerts.out"
    webhook_url: str | None = None
    news_path: str | None = None
    token_ttl_seconds: float = 3600.0
    medicines: dict = field(default_factory=lambda: dict(DEFAULT_MEDICINES))
    # optional ingest fixture paths used to resolve non-clinical fields
    weather_path: str | None = None
    trends_path: str | None = None
    tweets_path: str | None = None
    # browser dashboard wiring: allowed CORS origins, and an optional built
    # frontend directory to serve same-origin at /
    cors_origins: tuple = ()
    frontend_dist: str | None = None


def load_config(path: str | None = None, env: dict | None = None) -> AppConfig:
    """Read the config file (when given) and apply environment overrides."""
    cfg = AppConfig()
    if path is not None:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f for f in AppConfig.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "medicines" in data:
            merged = dict(DEFAULT_MEDICINES)
            merged.update(data["medicines"])
            data["medicines"] = merged
        cfg = replace(cfg, **data)
    env = os.environ if env is None else env
    overrides = {}
    for var, (name, cast) in _ENV_OVERRIDES.items():
        if var in env:
            overrides[name] = cast(env[var])
    return replace(cfg, **overrides) if overrides else cfg
