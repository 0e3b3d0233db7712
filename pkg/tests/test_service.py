import datetime as dt
import json

import numpy as np
from fastapi.testclient import TestClient

from epiwarn.config import AppConfig
from epiwarn.classify import TrainedClassifier
from epiwarn.exceptions import ModelNotTrained, ProviderError
from epiwarn.lstm import NetworkConfig, init_network
from epiwarn.preprocessing import ScalerParams
from epiwarn.providers import FileAlertProvider
from epiwarn.service import create_app
from epiwarn.store import DiseaseWeekRow, Store, UserRecord
from epiwarn.weeks import Disease, WeekKey

NOW = 1_700_000_000.0  # 2023-11-14 UTC
TODAY = dt.datetime.fromtimestamp(NOW, tz=dt.timezone.utc).date()


class FixedProba:
    """Stand-in classifier model with a constant probability."""

    def __init__(self, p: float):
        self.p = p

    def predict_proba(self, X):
        return np.full(len(X), self.p)


class FakeRegistry:
    def __init__(self, net, clf_kind="random_forest", clf=None):
        self.net = net
        self.clf_kind = clf_kind
        self.clf = clf or TrainedClassifier(kind=clf_kind, model=FixedProba(0.73))

    def forecaster(self, disease):
        return self.net

    def classifier(self, disease):
        return self.clf_kind, self.clf


class UntrainedRegistry:
    def forecaster(self, disease):
        raise ModelNotTrained("nothing trained")

    def classifier(self, disease):
        raise ModelNotTrained("nothing trained")


class FlakyProvider:
    """Fails permanently for one phone number."""

    def __init__(self, bad_phone):
        self.bad_phone = bad_phone
        self.sent = []

    def send(self, to, message):
        if to == self.bad_phone:
            raise ProviderError("gateway down")
        self.sent.append((to, message))


def tiny_net():
    net = init_network(NetworkConfig(layer_units=(4, 4), dense_units=4, window=5, seed=0))
    net.scaler = ScalerParams(0.0, 200.0)
    return net


def make_env(tmp_path, *, n_weeks=60, alert_provider=None, registry=None, news_items=None):
    store = Store(tmp_path / "svc.db", clock=lambda: NOW, token_ttl=3600.0)
    store.migrate()
    week = WeekKey(2022, 1)
    for i in range(n_weeks):
        store.upsert_week(
            Disease.INFLUENZA,
            DiseaseWeekRow(
                id=None,
                week=week,
                precipitation=1.0 + i * 0.01,
                temperature=5.0,
                search_volume=40.0,
                tweet_count=10 + i,
                cases=100 + i,
            ),
        )
        week = week.next()
    store.create_admin("Root", "root@x.org", "pw")
    store.register_user(UserRecord(None, "P1", "+15550000001", "Pharm One", "a", "pharmacy", "p1@x.org"))
    store.register_user(UserRecord(None, "P2", "+15550000002", "Pharm Two", "b", "pharmacy", "p2@x.org"))
    store.register_user(UserRecord(None, "H1", "+15550000003", "Hosp One", "c", "hospital", "h1@x.org"))

    news_path = tmp_path / "news.json"
    if news_items is None:
        news_items = [
            {
                "title": f"story {i}",
                "source": "wire",
                "date": (TODAY - dt.timedelta(days=i)).isoformat(),
                "disease": "influenza",
            }
            for i in range(10)
        ]
    news_path.write_text(json.dumps(news_items))

    config = AppConfig(
        store_path=str(tmp_path / "svc.db"),
        artifacts_dir=str(tmp_path / "artifacts"),
        alert_log_path=str(tmp_path / "alerts.out"),
        news_path=str(news_path),
    )
    provider = alert_provider or FileAlertProvider(config.alert_log_path, clock=lambda: NOW)
    app = create_app(
        config,
        store=store,
        registry=registry or FakeRegistry(tiny_net()),
        now=lambda: NOW,
        alert_provider=provider,
    )
    return TestClient(app), store


def login(client) -> dict:
    resp = client.post("/auth/login", json={"email": "root@x.org", "password": "pw"})
    assert resp.status_code == 200
    return {"Authorization": f"Bearer {resp.json()['token']}"}


class TestAuth:
    def test_login_returns_token(self, tmp_path):
        client, _ = make_env(tmp_path)
        resp = client.post("/auth/login", json={"email": "root@x.org", "password": "pw"})
        assert resp.status_code == 200
        assert "token" in resp.json()

    def test_wrong_password_401(self, tmp_path):
        client, _ = make_env(tmp_path)
        resp = client.post("/auth/login", json={"email": "root@x.org", "password": "bad"})
        assert resp.status_code == 401
        assert resp.json()["error"] == "invalid_credentials"

    def test_unknown_email_same_shape(self, tmp_path):
        client, _ = make_env(tmp_path)
        a = client.post("/auth/login", json={"email": "ghost@x.org", "password": "pw"}).json()
        b = client.post("/auth/login", json={"email": "root@x.org", "password": "bad"}).json()
        assert a["error"] == b["error"] == "invalid_credentials"


class TestUsers:
    def test_register_201(self, tmp_path):
        client, _ = make_env(tmp_path)
        resp = client.post(
            "/users",
            json={
                "name": "New",
                "phone": "+15559998888",
                "organisation_name": "Clinic",
                "organisation_address": "2 Oak",
                "category": "health_center",
                "email": "new@x.org",
            },
        )
        assert resp.status_code == 201
        assert isinstance(resp.json()["id"], int)

    def test_duplicate_409(self, tmp_path):
        client, _ = make_env(tmp_path)
        body = {
            "name": "New",
            "phone": "+1",
            "organisation_name": "o",
            "organisation_address": "a",
            "category": "pharmacy",
            "email": "p1@x.org",
        }
        resp = client.post("/users", json=body)
        assert resp.status_code == 409
        assert resp.json()["error"] == "duplicate_email"

    def test_list_filter(self, tmp_path):
        client, _ = make_env(tmp_path)
        assert len(client.get("/users", params={"category": "pharmacy"}).json()["users"]) == 2
        assert len(client.get("/users").json()["users"]) == 3
        # the documented empty-value and "all" forms both mean no filter
        assert len(client.get("/users?category=").json()["users"]) == 3
        assert len(client.get("/users", params={"category": "all"}).json()["users"]) == 3

    def test_list_unknown_category_400(self, tmp_path):
        client, _ = make_env(tmp_path)
        resp = client.get("/users", params={"category": "bakery"})
        assert resp.status_code == 400
        assert resp.json()["error"] == "validation_error"


class TestDashboard:
    def test_payload_shape(self, tmp_path):
        client, _ = make_env(tmp_path)
        resp = client.get("/diseases/influenza/dashboard")
        assert resp.status_code == 200
        payload = resp.json()
        assert payload["disease"] == "influenza"
        assert len(payload["history"]) == 50
        assert len(payload["forecast"]) == 5
        assert all(v >= 0 for v in payload["forecast"])
        assert payload["probability"] == 0.73
        assert payload["model_meta"] == {"forecaster": "lstm", "classifier": "random_forest"}
        assert payload["medicines"]
        # forecast weeks continue the history
        assert payload["forecast_weeks"][0] != payload["history"][-1]["week"]

    def test_insufficient_history(self, tmp_path):
        client, _ = make_env(tmp_path, n_weeks=3)
        resp = client.get("/diseases/influenza/dashboard")
        assert resp.status_code == 409
        assert resp.json()["error"] == "insufficient_history"

    def test_unknown_disease_404(self, tmp_path):
        client, _ = make_env(tmp_path)
        resp = client.get("/diseases/plague/dashboard")
        assert resp.status_code == 404
        assert resp.json()["error"] == "unknown_disease"

    def test_model_not_trained_409(self, tmp_path):
        client, _ = make_env(tmp_path, registry=UntrainedRegistry())
        resp = client.get("/diseases/influenza/dashboard")
        assert resp.status_code == 409
        assert resp.json()["error"] == "model_not_trained"

    def test_read_only_repeatable(self, tmp_path):
        client, _ = make_env(tmp_path)
        first = client.get("/diseases/influenza/dashboard").json()
        second = client.get("/diseases/influenza/dashboard").json()
        assert first == second


class TestInsertWeek:
    def test_insert_with_overrides(self, tmp_path):
        client, store = make_env(tmp_path)
        headers = login(client)
        resp = client.post(
            "/diseases/influenza/weeks",
            json={"cases": 123, "precipitation": 2.0, "temperature": 6.0, "search_volume": 50.0, "tweet_count": 20},
            headers=headers,
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["cases"] == 123
        stored = store.query_last_n(Disease.INFLUENZA, 1)[0]
        assert stored.cases == 123
        assert stored.week == WeekKey.parse(body["week"])

    def test_missing_token_401(self, tmp_path):
        client, _ = make_env(tmp_path)
        resp = client.post("/diseases/influenza/weeks", json={"cases": 5})
        assert resp.status_code == 401
        assert resp.json()["error"] == "unauthorized"

    def test_negative_cases_400(self, tmp_path):
        client, _ = make_env(tmp_path)
        resp = client.post("/diseases/influenza/weeks", json={"cases": -1}, headers=login(client))
        assert resp.status_code == 400
        assert resp.json()["error"] == "validation_error"

    def test_unresolvable_features_503(self, tmp_path):
        client, _ = make_env(tmp_path)
        resp = client.post("/diseases/influenza/weeks", json={"cases": 5}, headers=login(client))
        assert resp.status_code == 503
        assert resp.json()["error"] == "provider_unavailable"

    def test_explicit_week_upsert(self, tmp_path):
        client, store = make_env(tmp_path)
        headers = login(client)
        resp = client.post(
            "/diseases/influenza/weeks",
            json={
                "cases": 7,
                "iso_year": 2022,
                "iso_week": 1,
                "precipitation": 1.0,
                "temperature": 2.0,
                "search_volume": 3.0,
                "tweet_count": 4,
            },
            headers=headers,
        )
        assert resp.status_code == 200
        first = store.query_last_n(Disease.INFLUENZA, 1 << 30)[0]
        assert first.week == WeekKey(2022, 1) and first.cases == 7


class TestAlerts:
    def test_category_filter_two_pharmacies(self, tmp_path):
        client, store = make_env(tmp_path)
        resp = client.post(
            "/alerts",
            json={"diseases": ["influenza"], "categories": ["pharmacy"], "message": "stock up"},
            headers=login(client),
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["recipient_count"] == 2
        assert all(s["status"] == "sent" for s in body["statuses"])
        logged = store.get_alert(body["id"])
        assert logged.recipient_count == 2

    def test_all_categories(self, tmp_path):
        client, _ = make_env(tmp_path)
        resp = client.post(
            "/alerts", json={"categories": "all", "diseases": "all", "message": "x"}, headers=login(client)
        )
        assert resp.json()["recipient_count"] == 3

    def test_partial_failure_mixed_statuses(self, tmp_path):
        provider = FlakyProvider(bad_phone="+15550000002")
        client, _ = make_env(tmp_path, alert_provider=provider)
        resp = client.post(
            "/alerts", json={"categories": "all", "diseases": "all", "message": "x"}, headers=login(client)
        )
        assert resp.status_code == 200
        statuses = {s["recipient"]: s["status"] for s in resp.json()["statuses"]}
        assert statuses["+15550000002"] == "failed"
        assert sum(1 for v in statuses.values() if v == "sent") == 2

    def test_requires_token(self, tmp_path):
        client, _ = make_env(tmp_path)
        resp = client.post("/alerts", json={"message": "x"})
        assert resp.status_code == 401

    def test_empty_message_400(self, tmp_path):
        client, _ = make_env(tmp_path)
        resp = client.post("/alerts", json={"message": "  "}, headers=login(client))
        assert resp.status_code == 400

    def test_empty_category_list_400(self, tmp_path):
        client, _ = make_env(tmp_path)
        resp = client.post("/alerts", json={"message": "x", "categories": []}, headers=login(client))
        assert resp.status_code == 400

    def test_no_recipients_422(self, tmp_path):
        client, _ = make_env(tmp_path)
        resp = client.post(
            "/alerts", json={"message": "x", "categories": ["health_center"]}, headers=login(client)
        )
        assert resp.status_code == 422
        assert resp.json()["error"] == "no_recipients"

    def test_recipient_count_matches_store_at_dispatch_time(self, tmp_path):
        client, store = make_env(tmp_path)
        headers = login(client)
        store.register_user(UserRecord(None, "P3", "+15550000009", "Pharm3", "d", "pharmacy", "p3@x.org"))
        resp = client.post(
            "/alerts", json={"message": "x", "categories": ["pharmacy"]}, headers=headers
        )
        assert resp.json()["recipient_count"] == 3


class TestNews:
    def test_seven_day_window(self, tmp_path):
        client, _ = make_env(tmp_path)
        resp = client.get("/diseases/influenza/news")
        assert resp.status_code == 200
        headlines = resp.json()["headlines"]
        assert len(headlines) == 8  # offsets 0..7 of the 10 fixtures

    def test_empty_for_other_disease(self, tmp_path):
        client, _ = make_env(tmp_path)
        assert client.get("/diseases/malaria/news").json()["headlines"] == []


class TestTokenExpiry:
    def test_expired_token_rejected(self, tmp_path):
        # sessions written with clock NOW expire before a much later request
        store = Store(tmp_path / "exp.db", clock=lambda: NOW, token_ttl=10.0)
        store.migrate()
        store.create_admin("Root", "root@x.org", "pw")
        token = store.authenticate_admin("root@x.org", "pw")
        late_store = Store(tmp_path / "exp.db", clock=lambda: NOW + 11.0, token_ttl=10.0)
        assert late_store.validate_token(token) is None
