import pytest

from epiwarn.exceptions import (
    DuplicateEmail,
    InvalidCredentials,
    StorageUnavailable,
    ValidationError,
)
from epiwarn.store import (
    AlertLogRow,
    DeliveryStatus,
    DiseaseWeekRow,
    Store,
    UserRecord,
    hash_password,
    verify_password,
)
from epiwarn.weeks import Disease, WeekKey


@pytest.fixture
def store(tmp_path):
    s = Store(tmp_path / "test.db")
    s.migrate()
    return s


def week_row(week: WeekKey, cases: int = 10) -> DiseaseWeekRow:
    return DiseaseWeekRow(
        id=None, week=week, precipitation=1.5, temperature=4.0, search_volume=33.0, tweet_count=12, cases=cases
    )


def user(email: str, category: str = "pharmacy") -> UserRecord:
    return UserRecord(
        id=None,
        name="Someone",
        phone="+15550001111",
        organisation_name="Org",
        organisation_address="1 Main St",
        category=category,
        email=email,
    )


class TestMigrate:
    def test_fresh_store_version_one(self, tmp_path):
        assert Store(tmp_path / "a.db").migrate() == 1

    def test_idempotent(self, store):
        assert store.migrate() == 1
        assert store.migrate() == 1

    def test_unreachable_storage(self, tmp_path):
        bad = Store(tmp_path / "missing_dir" / "a.db")
        with pytest.raises(StorageUnavailable):
            bad.migrate()


class TestWeeks:
    def test_insert_read_back(self, store):
        row = week_row(WeekKey(2021, 5))
        store.upsert_week(Disease.MALARIA, row)
        got = store.query_last_n(Disease.MALARIA, 10)
        assert len(got) == 1
        stored = got[0]
        assert stored.week == row.week and stored.cases == row.cases
        assert stored.precipitation == row.precipitation

    def test_upsert_overwrites_same_week(self, store):
        store.upsert_week(Disease.MALARIA, week_row(WeekKey(2021, 5), cases=10))
        store.upsert_week(Disease.MALARIA, week_row(WeekKey(2021, 5), cases=99))
        got = store.query_last_n(Disease.MALARIA, 10)
        assert len(got) == 1 and got[0].cases == 99

    def test_negative_cases_rejected(self, store):
        with pytest.raises(ValidationError):
            store.upsert_week(Disease.MALARIA, week_row(WeekKey(2021, 5), cases=-1))

    def test_tables_are_per_disease(self, store):
        store.upsert_week(Disease.MALARIA, week_row(WeekKey(2021, 5)))
        assert store.query_last_n(Disease.INFLUENZA, 10) == []

    def test_last_n_returns_latest_ascending(self, store):
        week = WeekKey(2020, 1)
        for i in range(60):
            store.upsert_week(Disease.HEPATITIS, week_row(week, cases=i))
            week = week.next()
        got = store.query_last_n(Disease.HEPATITIS, 50)
        assert len(got) == 50
        assert got[0].cases == 10 and got[-1].cases == 59
        assert all(a.week < b.week for a, b in zip(got, got[1:]))

    def test_fewer_rows_than_n(self, store):
        store.upsert_week(Disease.HEPATITIS, week_row(WeekKey(2021, 1)))
        assert len(store.query_last_n(Disease.HEPATITIS, 50)) == 1

    def test_empty_table(self, store):
        assert store.query_last_n(Disease.HEPATITIS) == []

    def test_suffix_property(self, store):
        week = WeekKey(2020, 1)
        for i in range(30):
            store.upsert_week(Disease.MALARIA, week_row(week, cases=i))
            week = week.next()
        larger = store.query_last_n(Disease.MALARIA, 20)
        smaller = store.query_last_n(Disease.MALARIA, 5)
        assert larger[-5:] == smaller


class TestUsers:
    def test_register_and_filter(self, store):
        store.register_user(user("a@x.org", "pharmacy"))
        store.register_user(user("b@x.org", "pharmacy"))
        store.register_user(user("c@x.org", "hospital"))
        assert len(store.list_users("pharmacy")) == 2
        assert len(store.list_users()) == 3

    def test_duplicate_email(self, store):
        store.register_user(user("a@x.org"))
        with pytest.raises(DuplicateEmail):
            store.register_user(user("a@x.org", "hospital"))

    def test_invalid_category(self, store):
        with pytest.raises(ValidationError):
            store.register_user(user("a@x.org", "bakery"))

    def test_empty_phone(self, store):
        bad = UserRecord(None, "n", " ", "o", "a", "pharmacy", "e@x.org")
        with pytest.raises(ValidationError):
            store.register_user(bad)


class TestAdminAuth:
    def test_login_round_trip(self, store):
        store.create_admin("Root", "root@x.org", "s3cret")
        token = store.authenticate_admin("root@x.org", "s3cret")
        assert store.validate_token(token) is not None

    def test_wrong_password(self, store):
        store.create_admin("Root", "root@x.org", "s3cret")
        with pytest.raises(InvalidCredentials):
            store.authenticate_admin("root@x.org", "nope")

    def test_unknown_email_same_error_shape(self, store):
        store.create_admin("Root", "root@x.org", "s3cret")
        with pytest.raises(InvalidCredentials) as unknown:
            store.authenticate_admin("ghost@x.org", "s3cret")
        with pytest.raises(InvalidCredentials) as wrong:
            store.authenticate_admin("root@x.org", "bad")
        assert str(unknown.value) == str(wrong.value)

    def test_token_expiry(self, tmp_path):
        fake_now = [1000.0]
        store = Store(tmp_path / "t.db", clock=lambda: fake_now[0], token_ttl=60.0)
        store.migrate()
        store.create_admin("Root", "root@x.org", "pw")
        token = store.authenticate_admin("root@x.org", "pw")
        assert store.validate_token(token) is not None
        fake_now[0] = 1061.0
        assert store.validate_token(token) is None

    def test_no_password_material_exposed(self, store):
        store.create_admin("Root", "root@x.org", "pw")
        store.register_user(user("u@x.org"))
        for record in store.list_users():
            assert not hasattr(record, "password_hash")

    def test_hashes_are_salted_and_verifiable(self):
        h1, h2 = hash_password("same"), hash_password("same")
        assert h1 != h2
        assert verify_password("same", h1) and verify_password("same", h2)
        assert not verify_password("other", h1)


def alert_row(statuses, message="stock up") -> AlertLogRow:
    return AlertLogRow(
        id=None,
        timestamp=1234.5,
        diseases=frozenset({"influenza"}),
        categories=frozenset({"pharmacy"}),
        message=message,
        recipient_count=len(statuses),
        statuses=tuple(statuses),
    )


class TestAlertLog:
    def test_record_and_fetch(self, store):
        row = alert_row([DeliveryStatus("+15550001111", "sent"), DeliveryStatus("+15550002222", "failed", "boom")])
        alert_id = store.record_alert(row)
        got = store.get_alert(alert_id)
        assert got.recipient_count == 2
        assert got.statuses[1].status == "failed"
        assert got.diseases == {"influenza"}

    def test_recipient_count_mismatch(self, store):
        bad = AlertLogRow(
            id=None,
            timestamp=1.0,
            diseases=frozenset({"malaria"}),
            categories=frozenset({"hospital"}),
            message="x",
            recipient_count=3,
            statuses=(DeliveryStatus("+1", "sent"),),
        )
        with pytest.raises(ValidationError):
            store.record_alert(bad)

    def test_empty_message(self, store):
        with pytest.raises(ValidationError):
            store.record_alert(alert_row([DeliveryStatus("+1", "sent")], message="  "))

    def test_missing_alert_is_none(self, store):
        assert store.get_alert(999) is None
