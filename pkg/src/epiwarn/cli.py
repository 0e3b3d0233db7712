"""Operator command surface.

Every subcommand is deterministic given the store contents, configuration and
seeds. Domain errors exit 1 with the message on stderr; usage errors exit 2.
"""

from __future__ import annotations

import functools
import json
from pathlib import Path

import click

from . import artifacts
from .arima import FitReport, arima_aic, arima_auto_search, arima_fit, arima_one_step_predictions
from .classify import (
    ClassifierKind,
    FeatureRow,
    build_dataset,
    evaluate,
    export_eval_table,
    predict_proba,
    select_model,
    split_dataset,
    train_classifier,
)
from .config import AppConfig, load_config
from .demo import DEMO_ADMIN_EMAIL, DEMO_ADMIN_PASSWORD, seed_demo
from .exceptions import EpiwarnError, InsufficientHistory, TooShort
from .ingest import SourceKind, aggregate_daily_to_weekly, merge_weekly, parse_source, validate_and_impute
from .lstm import (
    LstmForecaster,
    forecast_recursive,
    lstm_one_step_predictions,
    network_config_for,
)
from .metrics import compute_metrics
from .preprocessing import split_chronological
from .providers import FileAlertProvider, WebhookAlertProvider, dispatch_alert
from .store import AlertLogRow, CATEGORIES, DeliveryStatus, DiseaseWeekRow, Store
from .weeks import Disease, WeeklySeries

ALL_WEEKS = 1 << 30


def domain_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except EpiwarnError as exc:
            raise click.ClickException(f"{exc.code}: {exc}") from exc

    return wrapper


def _store(config: AppConfig) -> Store:
    store = Store(config.store_path, token_ttl=config.token_ttl_seconds)
    store.migrate()
    return store


def _series(store: Store, disease: Disease) -> WeeklySeries:
    rows = store.query_last_n(disease, ALL_WEEKS)
    if not rows:
        raise InsufficientHistory(f"no stored weeks for {disease.value}")
    return WeeklySeries(disease, tuple((r.week, float(r.cases)) for r in rows))


def _alert_provider(config: AppConfig):
    if config.alert_provider == "webhook":
        if not config.webhook_url:
            raise click.ClickException("config error: webhook provider needs webhook_url")
        return WebhookAlertProvider(config.webhook_url)
    return FileAlertProvider(config.alert_log_path)


DISEASE_ARG = click.option(
    "--disease",
    "disease_name",
    type=click.Choice([d.value for d in Disease]),
    required=True,
)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_context
def main(ctx: click.Context, config_path: str | None):
    """Epidemic early-warning toolkit: ingest, train, evaluate, forecast, serve."""
    ctx.obj = load_config(config_path)


@main.command()
@DISEASE_ARG
@click.option("--weather", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--trends", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--tweets", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--incidence", type=click.Path(exists=True, dir_okay=False), required=True)
@click.pass_obj
@domain_errors
def ingest(config: AppConfig, disease_name: str, weather: str, trends: str, tweets: str, incidence: str):
    """Parse the four source files, merge on week keys, store the result."""
    disease = Disease(disease_name)
    daily = parse_source(SourceKind.WEATHER_DAILY, Path(weather).read_text(encoding="utf-8"))
    trend_rows = [
        r
        for r in parse_source(SourceKind.SEARCH_TRENDS_WEEKLY, Path(trends).read_text(encoding="utf-8"))
        if r.disease == disease
    ]
    tweet_rows = parse_source(SourceKind.TWEET_COUNTS_WEEKLY, Path(tweets).read_text(encoding="utf-8"))
    incidence_rows = [
        r
        for r in parse_source(SourceKind.INCIDENCE_WEEKLY, Path(incidence).read_text(encoding="utf-8"))
        if r.disease == disease
    ]
    merged = merge_weekly(disease, aggregate_daily_to_weekly(daily), trend_rows, tweet_rows, incidence_rows)
    clean = validate_and_impute(merged)
    store = _store(config)
    for row in clean:
        store.upsert_week(
            disease,
            DiseaseWeekRow(
                id=None,
                week=row.week,
                precipitation=row.precipitation,
                temperature=row.temperature,
                search_volume=row.search_volume,
                tweet_count=row.tweet_count,
                cases=row.cases,
            ),
        )
    imputed = sum(1 for r in clean if r.imputed)
    click.echo(f"stored {len(clean)} weeks for {disease.value} ({imputed} imputed)")


@main.command("train-forecaster")
@DISEASE_ARG
@click.option("--model", "model_name", type=click.Choice(["lstm", "arima"]), default="lstm")
@click.option("--epochs", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_obj
@domain_errors
def train_forecaster(config: AppConfig, disease_name: str, model_name: str, epochs: int, seed: int):
    """Hold out the last quarter for a test score, then fit the final model on
    the full history and save the artifact."""
    disease = Disease(disease_name)
    store = _store(config)
    series = _series(store, disease)
    train_part, test_part = split_chronological(series, 0.25)
    values = series.values()
    n_test = len(test_part)

    if model_name == "arima":
        order, _ = arima_auto_search(train_part.values())
        eval_model = arima_fit(train_part.values(), order)
        preds = arima_one_step_predictions(eval_model, values, n_test)
        report = compute_metrics(test_part.values(), preds, train_part.values())
        final = arima_fit(values, order)
        path = artifacts.save_arima_model(config.artifacts_dir, disease, final)
        fit_report = FitReport(order=order, aic=arima_aic(final), rmse_test=report.rmse, converged=final.converged)
        click.echo(
            f"arima {disease.value}: order {fit_report.order} aic {fit_report.aic:.2f} "
            f"test-rmse {fit_report.rmse_test:.4f} converged {fit_report.converged}"
        )
        click.echo(f"saved {path}")
        return

    net_cfg = network_config_for(disease, seed=seed)
    est = LstmForecaster(
        layer_units=net_cfg.layer_units,
        dense_units=net_cfg.dense_units,
        window=net_cfg.window,
        seed=seed,
        epochs=epochs,
    )
    est.fit(train_part.values())
    preds = lstm_one_step_predictions(est.net_, est.net_.scaler, values, n_test)
    report = compute_metrics(test_part.values(), preds, train_part.values())
    final = LstmForecaster(
        layer_units=net_cfg.layer_units,
        dense_units=net_cfg.dense_units,
        window=net_cfg.window,
        seed=seed,
        epochs=epochs,
    )
    final.fit(values)
    path = artifacts.save_forecaster(config.artifacts_dir, disease, final.net_)
    units = "-".join(str(u) for u in net_cfg.layer_units)
    click.echo(
        f"lstm {disease.value}: units {units} epochs {epochs} "
        f"test-rmse {report.rmse:.4f} mase {report.mase:.4f}"
    )
    click.echo(f"saved {path}")


def _labeled_weeks(store: Store, disease: Disease):
    rows = store.query_last_n(disease, ALL_WEEKS)
    if len(rows) < 2:
        raise TooShort(f"need at least 2 stored weeks for {disease.value}")
    return [
        (
            FeatureRow(
                precipitation=r.precipitation,
                temperature=r.temperature,
                search_volume=r.search_volume,
                tweet_count=r.tweet_count,
            ),
            float(r.cases),
        )
        for r in rows
    ]


@main.command("train-classifier")
@DISEASE_ARG
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_obj
@domain_errors
def train_classifier_cmd(config: AppConfig, disease_name: str, seed: int):
    """Train all classifier kinds, pick the winner, persist it."""
    disease = Disease(disease_name)
    store = _store(config)
    dataset = build_dataset(_labeled_weeks(store, disease))
    train_set, test_set = split_dataset(dataset, 0.25)
    trained = {}
    reports = []
    for kind in ClassifierKind:
        clf = train_classifier(kind, train_set, seed=seed)
        trained[kind] = clf
        reports.append(evaluate(clf, train_set, test_set))
    click.echo(export_eval_table(reports), nl=False)
    winner = select_model(reports)
    path = artifacts.save_classifier(config.artifacts_dir, disease, winner.value, trained[winner], reports)
    click.echo(f"selected {winner.value}")
    click.echo(f"saved {path}")


@main.command("evaluate")
@DISEASE_ARG
@click.option("--epochs", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_obj
@domain_errors
def evaluate_cmd(config: AppConfig, disease_name: str, epochs: int, seed: int):
    """Report classifier accuracies and forecaster test errors."""
    disease = Disease(disease_name)
    store = _store(config)

    dataset = build_dataset(_labeled_weeks(store, disease))
    train_set, test_set = split_dataset(dataset, 0.25)
    reports = []
    for kind in ClassifierKind:
        clf = train_classifier(kind, train_set, seed=seed)
        reports.append(evaluate(clf, train_set, test_set))
    click.echo("== classification ==")
    click.echo(export_eval_table(reports), nl=False)
    try:
        click.echo(f"selected: {select_model(reports).value}")
    except EpiwarnError as exc:
        click.echo(f"selected: none ({exc.code})")

    series = _series(store, disease)
    train_part, test_part = split_chronological(series, 0.25)
    values = series.values()
    n_test = len(test_part)
    click.echo("== forecasting ==")
    click.echo("model,config,rmse,mae,mase")
    order, _ = arima_auto_search(train_part.values())
    arima_model = arima_fit(train_part.values(), order)
    preds = arima_one_step_predictions(arima_model, values, n_test)
    m = compute_metrics(test_part.values(), preds, train_part.values())
    click.echo(f"arima,\"{order}\",{m.rmse:.4f},{m.mae:.4f},{m.mase:.4f}")
    net_cfg = network_config_for(disease, seed=seed)
    est = LstmForecaster(
        layer_units=net_cfg.layer_units,
        dense_units=net_cfg.dense_units,
        window=net_cfg.window,
        seed=seed,
        epochs=epochs,
    )
    est.fit(train_part.values())
    preds = lstm_one_step_predictions(est.net_, est.net_.scaler, values, n_test)
    m = compute_metrics(test_part.values(), preds, train_part.values())
    units = "-".join(str(u) for u in net_cfg.layer_units)
    click.echo(f"lstm,{units},{m.rmse:.4f},{m.mae:.4f},{m.mase:.4f}")


def _dashboard_data(config: AppConfig, disease: Disease) -> dict:
    store = _store(config)
    net = artifacts.load_forecaster(config.artifacts_dir, disease)
    history = store.query_last_n(disease, 50)
    if len(history) < net.config.window:
        raise InsufficientHistory(
            f"need at least {net.config.window} stored weeks, have {len(history)}"
        )
    recent = [r.cases for r in history[-net.config.window :]]
    forecast = forecast_recursive(net, net.scaler, recent, horizon=5)
    weeks_ahead = []
    week = history[-1].week
    for _ in range(5):
        week = week.next()
        weeks_ahead.append(week)
    return {"history": history, "forecast": forecast, "forecast_weeks": weeks_ahead}


@main.command()
@DISEASE_ARG
@click.pass_obj
@domain_errors
def forecast(config: AppConfig, disease_name: str):
    """Print the 5-week case forecast, one number per line."""
    data = _dashboard_data(config, Disease(disease_name))
    for value in data["forecast"]:
        click.echo(f"{value:.2f}")


@main.command()
@DISEASE_ARG
@click.pass_obj
@domain_errors
def probability(config: AppConfig, disease_name: str):
    """Print the outbreak probability from the persisted classifier."""
    disease = Disease(disease_name)
    store = _store(config)
    _, clf, _ = artifacts.load_classifier(config.artifacts_dir, disease)
    rows = store.query_last_n(disease, 1)
    if not rows:
        raise InsufficientHistory(f"no stored weeks for {disease.value}")
    latest = rows[0]
    p = predict_proba(
        clf,
        FeatureRow(
            precipitation=latest.precipitation,
            temperature=latest.temperature,
            search_volume=latest.search_volume,
            tweet_count=latest.tweet_count,
        ),
    )
    click.echo(f"{p:.4f}")


@main.command("export-plot")
@DISEASE_ARG
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.pass_obj
@domain_errors
def export_plot(config: AppConfig, disease_name: str, out_path: str):
    """Write history + forecast as a structured JSON file for plotting."""
    disease = Disease(disease_name)
    data = _dashboard_data(config, disease)
    payload = {
        "disease": disease.value,
        "history": [{"week": str(r.week), "cases": r.cases} for r in data["history"]],
        "forecast": [
            {"week": str(w), "cases": round(v, 6)}
            for w, v in zip(data["forecast_weeks"], data["forecast"])
        ],
    }
    Path(out_path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    click.echo(f"wrote {out_path}")


@main.command("seed-demo")
@click.option("--weeks", type=int, default=260, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_obj
@domain_errors
def seed_demo_cmd(config: AppConfig, weeks: int, seed: int):
    """Populate the store with the synthetic dataset and demo accounts."""
    store = _store(config)
    summary = seed_demo(store, weeks=weeks, seed=seed)
    click.echo(
        f"seeded {summary['weeks_per_disease']} weeks per disease; "
        f"admin {DEMO_ADMIN_EMAIL} / {DEMO_ADMIN_PASSWORD}; "
        f"{summary['users_created']} demo users"
    )


@main.command()
@click.option("--port", type=int, default=None)
@click.pass_obj
@domain_errors
def serve(config: AppConfig, port: int | None):
    """Run the HTTP API."""
    import uvicorn

    from .service import create_app

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=port if port is not None else config.port)


@main.command("send-alert")
@click.option("--diseases", default="all", show_default=True, help="comma-separated or 'all'")
@click.option("--categories", default="all", show_default=True, help="comma-separated or 'all'")
@click.option("--message", required=True)
@click.pass_obj
@domain_errors
def send_alert(config: AppConfig, diseases: str, categories: str, message: str):
    """Fan an alert out to registered organisations (operator path, no token)."""
    import time

    if not message.strip():
        raise click.ClickException("message must be non-empty")
    store = _store(config)
    if diseases == "all":
        disease_set = {d.value for d in Disease}
    else:
        disease_set = {Disease.parse(x).value for x in diseases.split(",") if x.strip()}
    if categories == "all":
        category_set = set(CATEGORIES)
    else:
        category_set = {c.strip() for c in categories.split(",") if c.strip()}
        unknown = category_set - set(CATEGORIES)
        if unknown:
            raise click.ClickException(f"unknown categories: {sorted(unknown)}")
    recipients = [u for u in store.list_users() if u.category in category_set]
    if not recipients:
        raise click.ClickException("no recipients in the selected categories")
    provider = _alert_provider(config)
    statuses = []
    for user in recipients:
        try:
            dispatch_alert(provider, user.phone, message)
            statuses.append(DeliveryStatus(recipient=user.phone, status="sent"))
        except EpiwarnError as exc:
            statuses.append(DeliveryStatus(recipient=user.phone, status="failed", detail=str(exc)))
    alert_id = store.record_alert(
        AlertLogRow(
            id=None,
            timestamp=time.time(),
            diseases=frozenset(disease_set),
            categories=frozenset(category_set),
            message=message,
            recipient_count=len(statuses),
            statuses=tuple(statuses),
        )
    )
    sent = sum(1 for s in statuses if s.status == "sent")
    failed = len(statuses) - sent
    click.echo(f"alert {alert_id}: {sent} sent, {failed} failed")


if __name__ == "__main__":
    main()
