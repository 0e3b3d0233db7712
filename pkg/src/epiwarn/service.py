"""HTTP API tying the pipeline together.

Endpoints (JSON in/out, errors as {"error": code, "detail": text}):

    POST /auth/login                  -> session token
    POST /users                       -> register a recipient organisation
    GET  /users?category=             -> list recipients
    GET  /diseases/{d}/dashboard      -> history + forecast + probability
    POST /diseases/{d}/weeks          -> admin inserts a week of data
    POST /alerts                      -> fan an alert out to recipients
    GET  /diseases/{d}/news           -> headlines from the last 7 days

Every mutating endpoint except user registration requires a Bearer token
from /auth/login. "Now" is injectable so token expiry and the news window
are testable.
"""

from __future__ import annotations

import datetime as dt
import time
from typing import Callable, Literal

from fastapi import Depends, FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .artifacts import ModelRegistry
from .classify import FeatureRow, predict_proba
from .config import AppConfig
from .exceptions import (
    DuplicateEmail,
    EpiwarnError,
    InsufficientHistory,
    InvalidCredentials,
    ModelNotTrained,
    NoRecipients,
    ProviderError,
    ProviderUnavailable,
    StorageUnavailable,
    Unauthorized,
    UnknownDisease,
    ValidationError,
)
from .lstm import forecast_recursive
from .providers import (
    FileAlertProvider,
    FixtureFeatureProvider,
    FixtureNewsProvider,
    WebhookAlertProvider,
    dispatch_alert,
)
from .store import AlertLogRow, CATEGORIES, DeliveryStatus, DiseaseWeekRow, Store, UserRecord
from .weeks import Disease, WeekKey

_STATUS = {
    Unauthorized: 401,
    InvalidCredentials: 401,
    UnknownDisease: 404,
    DuplicateEmail: 409,
    InsufficientHistory: 409,
    ModelNotTrained: 409,
    ValidationError: 400,
    NoRecipients: 422,
    ProviderUnavailable: 503,
    StorageUnavailable: 503,
    ProviderError: 502,
}


class LoginBody(BaseModel):
    email: str
    password: str


class UserBody(BaseModel):
    name: str
    phone: str
    organisation_name: str
    organisation_address: str
    category: Literal["pharmacy", "health_center", "hospital"]
    email: str


class WeekBody(BaseModel):
    cases: int
    iso_year: int | None = None
    iso_week: int | None = None
    precipitation: float | None = None
    temperature: float | None = None
    search_volume: float | None = None
    tweet_count: int | None = None


class AlertBody(BaseModel):
    diseases: list[str] | Literal["all"] = Field(default="all")
    categories: list[str] | Literal["all"] = Field(default="all")
    message: str


def _week_json(row: DiseaseWeekRow) -> dict:
    return {
        "week": str(row.week),
        "iso_year": row.week.iso_year,
        "iso_week": row.week.iso_week,
        "precipitation": row.precipitation,
        "temperature": row.temperature,
        "search_volume": row.search_volume,
        "tweet_count": row.tweet_count,
        "cases": row.cases,
    }


def _alert_json(row: AlertLogRow, alert_id: int) -> dict:
    return {
        "id": alert_id,
        "timestamp": row.timestamp,
        "diseases": sorted(row.diseases),
        "categories": sorted(row.categories),
        "message": row.message,
        "recipient_count": row.recipient_count,
        "statuses": [
            {"recipient": s.recipient, "status": s.status, "detail": s.detail} for s in row.statuses
        ],
    }


def create_app(
    config: AppConfig | None = None,
    *,
    store: Store | None = None,
    registry: ModelRegistry | None = None,
    now: Callable[[], float] | None = None,
    alert_provider=None,
    news_provider=None,
    feature_provider=None,
) -> FastAPI:
    config = config or AppConfig()
    now = now or time.time
    store = store or Store(config.store_path, clock=now, token_ttl=config.token_ttl_seconds)
    registry = registry or ModelRegistry(config.artifacts_dir)
    if alert_provider is None:
        if config.alert_provider == "webhook":
            if not config.webhook_url:
                raise ValueError("webhook alert provider needs webhook_url")
            alert_provider = WebhookAlertProvider(config.webhook_url)
        else:
            alert_provider = FileAlertProvider(config.alert_log_path, clock=now)
    if news_provider is None and config.news_path:
        news_provider = FixtureNewsProvider(config.news_path)
    if feature_provider is None:
        feature_provider = FixtureFeatureProvider(
            weather_path=config.weather_path,
            trends_path=config.trends_path,
            tweets_path=config.tweets_path,
        )

    app = FastAPI(title="epiwarn", docs_url=None, redoc_url=None)

    if config.cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(EpiwarnError)
    async def _domain_error(_request: Request, exc: EpiwarnError):
        status = 400
        for cls, code in _STATUS.items():
            if isinstance(exc, cls):
                status = code
                break
        return JSONResponse(status_code=status, content={"error": exc.code, "detail": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def _bad_request(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"error": "validation_error", "detail": str(exc.errors())}
        )

    def parse_disease(d: str) -> Disease:
        return Disease.parse(d)

    def require_admin(authorization: str = Header(default="")) -> int:
        if not authorization.startswith("Bearer "):
            raise Unauthorized("missing bearer token")
        admin_id = store.validate_token(authorization.removeprefix("Bearer ").strip())
        if admin_id is None:
            raise Unauthorized("invalid or expired token")
        return admin_id

    @app.post("/auth/login")
    def login(body: LoginBody):
        token = store.authenticate_admin(body.email, body.password)
        return {"token": token, "expires_in": config.token_ttl_seconds}

    @app.post("/users", status_code=201)
    def register_user(body: UserBody):
        user = UserRecord(
            id=None,
            name=body.name,
            phone=body.phone,
            organisation_name=body.organisation_name,
            organisation_address=body.organisation_address,
            category=body.category,
            email=body.email,
        )
        return {"id": store.register_user(user)}

    @app.get("/users")
    def list_users(category: str | None = None):
        if category in (None, "", "all"):
            category = None
        users = store.list_users(category)
        return {
            "users": [
                {
                    "id": u.id,
                    "name": u.name,
                    "phone": u.phone,
                    "organisation_name": u.organisation_name,
                    "organisation_address": u.organisation_address,
                    "category": u.category,
                    "email": u.email,
                }
                for u in users
            ]
        }

    @app.get("/diseases/{d}/dashboard")
    def dashboard(d: str):
        disease = parse_disease(d)
        net = registry.forecaster(disease)
        kind, clf = registry.classifier(disease)
        history = store.query_last_n(disease, 50)
        window = net.config.window
        if len(history) < window:
            raise InsufficientHistory(
                f"need at least {window} stored weeks for {disease.value}, have {len(history)}"
            )
        recent = [r.cases for r in history[-window:]]
        forecast = forecast_recursive(net, net.scaler, recent, horizon=5)
        latest = history[-1]
        probability = predict_proba(
            clf,
            FeatureRow(
                precipitation=latest.precipitation,
                temperature=latest.temperature,
                search_volume=latest.search_volume,
                tweet_count=latest.tweet_count,
            ),
        )
        weeks_ahead = []
        week = latest.week
        for _ in range(5):
            week = week.next()
            weeks_ahead.append(str(week))
        return {
            "disease": disease.value,
            "history": [_week_json(r) for r in history],
            "forecast": forecast,
            "forecast_weeks": weeks_ahead,
            "probability": probability,
            "medicines": config.medicines.get(disease.value, []),
            "model_meta": {"forecaster": "lstm", "classifier": kind},
        }

    @app.post("/diseases/{d}/weeks")
    def insert_week(d: str, body: WeekBody, _admin: int = Depends(require_admin)):
        disease = parse_disease(d)
        if body.cases < 0:
            raise ValidationError(f"cases must be >= 0, got {body.cases}")
        if (body.iso_year is None) != (body.iso_week is None):
            raise ValidationError("iso_year and iso_week must be given together")
        if body.iso_year is not None:
            week = WeekKey(body.iso_year, body.iso_week)
        else:
            latest = store.latest_week(disease)
            if latest is None:
                raise ValidationError("store is empty; iso_year and iso_week are required")
            week = latest.next()
        overrides = {
            "precipitation": body.precipitation,
            "temperature": body.temperature,
            "search_volume": body.search_volume,
            "tweet_count": body.tweet_count,
        }
        if any(v is None for v in overrides.values()):
            resolved = feature_provider.resolve(disease, week)
            for name, value in overrides.items():
                if value is None:
                    overrides[name] = resolved[name]
        row = DiseaseWeekRow(
            id=None,
            week=week,
            precipitation=float(overrides["precipitation"]),
            temperature=float(overrides["temperature"]),
            search_volume=float(overrides["search_volume"]),
            tweet_count=int(overrides["tweet_count"]),
            cases=body.cases,
        )
        store.upsert_week(disease, row)
        return _week_json(row)

    @app.post("/alerts")
    def send_alert(body: AlertBody, _admin: int = Depends(require_admin)):
        if not body.message.strip():
            raise ValidationError("message must be non-empty")
        if body.diseases == "all":
            diseases = {d.value for d in Disease}
        else:
            if not body.diseases:
                raise ValidationError("diseases must be non-empty or 'all'")
            diseases = {Disease.parse(x).value for x in body.diseases}
        if body.categories == "all":
            categories = set(CATEGORIES)
        else:
            if not body.categories:
                raise ValidationError("categories must be non-empty or 'all'")
            unknown = set(body.categories) - set(CATEGORIES)
            if unknown:
                raise ValidationError(f"unknown categories: {sorted(unknown)}")
            categories = set(body.categories)

        recipients = [u for u in store.list_users() if u.category in categories]
        if not recipients:
            raise NoRecipients(f"no registered users in categories {sorted(categories)}")
        statuses = []
        for user in recipients:
            try:
                status = dispatch_alert(alert_provider, user.phone, body.message)
                statuses.append(DeliveryStatus(recipient=user.phone, status=status))
            except ProviderError as exc:
                statuses.append(DeliveryStatus(recipient=user.phone, status="failed", detail=str(exc)))
        log_row = AlertLogRow(
            id=None,
            timestamp=now(),
            diseases=frozenset(diseases),
            categories=frozenset(categories),
            message=body.message,
            recipient_count=len(statuses),
            statuses=tuple(statuses),
        )
        alert_id = store.record_alert(log_row)
        return _alert_json(log_row, alert_id)

    @app.get("/diseases/{d}/news")
    def news(d: str):
        disease = parse_disease(d)
        if news_provider is None:
            raise ProviderUnavailable("no news provider configured")
        today = dt.datetime.fromtimestamp(now(), tz=dt.timezone.utc).date()
        headlines = news_provider.fetch(disease, today)
        return {
            "headlines": [
                {"title": h.title, "source": h.source, "date": h.date.isoformat()} for h in headlines
            ]
        }

    if config.frontend_dist:
        from pathlib import Path

        from fastapi.staticfiles import StaticFiles

        dist = Path(config.frontend_dist)
        if dist.is_dir():
            app.mount("/", StaticFiles(directory=dist, html=True), name="dashboard")

    return app
