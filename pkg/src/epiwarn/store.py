"""SQLite persistence: per-disease weekly tables, users, admins, alert log.

One file, one schema version. Passwords are stored as salted scrypt hashes
and never leave this module; admin sessions are opaque expiring tokens kept
in their own table so any process with the store file can validate them.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import math
import secrets
import sqlite3
import time
from dataclasses import dataclass
from typing import Callable

from .exceptions import (
    DuplicateEmail,
    InvalidCredentials,
    StorageUnavailable,
    ValidationError,
)
from .weeks import Disease, WeekKey

SCHEMA_VERSION = 1
CATEGORIES = ("pharmacy", "health_center", "hospital")

_SCRYPT_N = 16384
_SCRYPT_R = 8
_SCRYPT_P = 1


@dataclass(frozen=True)
class UserRecord:
    id: int | None
    name: str
    phone: str
    organisation_name: str
    organisation_address: str
    category: str
    email: str


@dataclass(frozen=True)
class DiseaseWeekRow:
    id: int | None
    week: WeekKey
    precipitation: float
    temperature: float
    search_volume: float
    tweet_count: int
    cases: int


@dataclass(frozen=True)
class DeliveryStatus:
    recipient: str
    status: str  # "sent" | "failed"
    detail: str = ""


@dataclass(frozen=True)
class AlertLogRow:
    id: int | None
    timestamp: float
    diseases: frozenset[str]
    categories: frozenset[str]
    message: str
    recipient_count: int
    statuses: tuple[DeliveryStatus, ...]


def hash_password(password: str) -> str:
    salt = secrets.token_bytes(16)
    digest = hashlib.scrypt(
        password.encode("utf-8"), salt=salt, n=_SCRYPT_N, r=_SCRYPT_R, p=_SCRYPT_P
    )
    return f"scrypt${_SCRYPT_N}${_SCRYPT_R}${_SCRYPT_P}${salt.hex()}${digest.hex()}"


def verify_password(password: str, stored: str) -> bool:
    try:
        scheme, n, r, p, salt_hex, digest_hex = stored.split("$")
        if scheme != "scrypt":
            return False
        digest = hashlib.scrypt(
            password.encode("utf-8"), salt=bytes.fromhex(salt_hex), n=int(n), r=int(r), p=int(p)
        )
        return hmac.compare_digest(digest.hex(), digest_hex)
    except (ValueError, TypeError):
        return False


# hash comparison target for unknown emails, so both failure paths cost the same
_DUMMY_HASH = hash_password("-")

_TABLES = """
CREATE TABLE IF NOT EXISTS admins (
    id INTEGER PRIMARY KEY,
    name TEXT NOT NULL,
    email TEXT NOT NULL UNIQUE,
    password_hash TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS users (
    id INTEGER PRIMARY KEY,
    name TEXT NOT NULL,
    phone TEXT NOT NULL,
    organisation_name TEXT NOT NULL,
    organisation_address TEXT NOT NULL,
    category TEXT NOT NULL CHECK (category IN ('pharmacy', 'health_center', 'hospital')),
    email TEXT NOT NULL UNIQUE
);
CREATE TABLE IF NOT EXISTS sessions (
    token TEXT PRIMARY KEY,
    admin_id INTEGER NOT NULL REFERENCES admins(id),
    expires_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS alerts (
    id INTEGER PRIMARY KEY,
    created_at REAL NOT NULL,
    diseases TEXT NOT NULL,
    categories TEXT NOT NULL,
    message TEXT NOT NULL,
    recipient_count INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS alert_deliveries (
    id INTEGER PRIMARY KEY,
    alert_id INTEGER NOT NULL REFERENCES alerts(id),
    recipient TEXT NOT NULL,
    status TEXT NOT NULL,
    detail TEXT NOT NULL DEFAULT ''
);
"""

_WEEK_TABLE = """
CREATE TABLE IF NOT EXISTS weeks_{name} (
    id INTEGER PRIMARY KEY,
    iso_year INTEGER NOT NULL,
    iso_week INTEGER NOT NULL,
    precipitation REAL NOT NULL,
    temperature REAL NOT NULL,
    search_volume REAL NOT NULL,
    tweet_count INTEGER NOT NULL,
    cases INTEGER NOT NULL CHECK (cases >= 0),
    UNIQUE (iso_year, iso_week)
);
"""


class Store:
    """All persistence behind one object; connections are per-operation."""

    def __init__(self, path: str, clock: Callable[[], float] = time.time, token_ttl: float = 3600.0):
        self.path = str(path)
        self.clock = clock
        self.token_ttl = token_ttl

    def _connect(self) -> sqlite3.Connection:
        try:
            conn = sqlite3.connect(self.path)
        except sqlite3.Error as exc:
            raise StorageUnavailable(f"cannot open store at {self.path}: {exc}") from exc
        conn.row_factory = sqlite3.Row
        conn.execute("PRAGMA foreign_keys = ON")
        return conn

    def migrate(self) -> int:
        """Create all tables; safe to call repeatedly."""
        try:
            with self._connect() as conn:
                conn.executescript(_TABLES)
                for disease in Disease:
                    conn.executescript(_WEEK_TABLE.format(name=disease.value))
                conn.execute(f"PRAGMA user_version = {SCHEMA_VERSION}")
        except sqlite3.Error as exc:
            raise StorageUnavailable(f"migration failed: {exc}") from exc
        return SCHEMA_VERSION

    # -- weekly rows --------------------------------------------------------

    def upsert_week(self, disease: Disease, row: DiseaseWeekRow) -> None:
        if row.cases < 0:
            raise ValidationError(f"cases must be >= 0, got {row.cases}")
        for name in ("precipitation", "temperature", "search_volume"):
            if not math.isfinite(getattr(row, name)):
                raise ValidationError(f"{name} must be finite")
        if row.tweet_count < 0:
            raise ValidationError("tweet_count must be >= 0")
        with self._connect() as conn:
            conn.execute(
                f"""
                INSERT INTO weeks_{disease.value}
                    (iso_year, iso_week, precipitation, temperature, search_volume, tweet_count, cases)
                VALUES (?, ?, ?, ?, ?, ?, ?)
                ON CONFLICT (iso_year, iso_week) DO UPDATE SET
                    precipitation = excluded.precipitation,
                    temperature = excluded.temperature,
                    search_volume = excluded.search_volume,
                    tweet_count = excluded.tweet_count,
                    cases = excluded.cases
                """,
                (
                    row.week.iso_year,
                    row.week.iso_week,
                    row.precipitation,
                    row.temperature,
                    row.search_volume,
                    row.tweet_count,
                    row.cases,
                ),
            )

    def query_last_n(self, disease: Disease, n: int = 50) -> list[DiseaseWeekRow]:
        """At most n rows, chronologically ascending, ending at the latest week."""
        with self._connect() as conn:
            rows = conn.execute(
                f"""
                SELECT * FROM weeks_{disease.value}
                ORDER BY iso_year DESC, iso_week DESC LIMIT ?
                """,
                (n,),
            ).fetchall()
        return [self._week_row(r) for r in reversed(rows)]

    def count_weeks(self, disease: Disease) -> int:
        with self._connect() as conn:
            return conn.execute(f"SELECT COUNT(*) FROM weeks_{disease.value}").fetchone()[0]

    def latest_week(self, disease: Disease) -> WeekKey | None:
        rows = self.query_last_n(disease, 1)
        return rows[0].week if rows else None

    @staticmethod
    def _week_row(r: sqlite3.Row) -> DiseaseWeekRow:
        return DiseaseWeekRow(
            id=r["id"],
            week=WeekKey(r["iso_year"], r["iso_week"]),
            precipitation=r["precipitation"],
            temperature=r["temperature"],
            search_volume=r["search_volume"],
            tweet_count=r["tweet_count"],
            cases=r["cases"],
        )

    # -- users / admins ------------------------------------------------------

    def register_user(self, user: UserRecord) -> int:
        if user.category not in CATEGORIES:
            raise ValidationError(f"category must be one of {CATEGORIES}")
        if not user.phone.strip():
            raise ValidationError("phone must be non-empty")
        if not user.email.strip():
            raise ValidationError("email must be non-empty")
        try:
            with self._connect() as conn:
                cur = conn.execute(
                    """
                    INSERT INTO users (name, phone, organisation_name, organisation_address, category, email)
                    VALUES (?, ?, ?, ?, ?, ?)
                    """,
                    (
                        user.name,
                        user.phone,
                        user.organisation_name,
                        user.organisation_address,
                        user.category,
                        user.email,
                    ),
                )
                return cur.lastrowid
        except sqlite3.IntegrityError as exc:
            raise DuplicateEmail(f"email {user.email!r} already registered") from exc

    def list_users(self, category: str | None = None) -> list[UserRecord]:
        if category is not None and category not in CATEGORIES:
            raise ValidationError(f"category must be one of {CATEGORIES}")
        query = "SELECT * FROM users"
        args: tuple = ()
        if category is not None:
            query += " WHERE category = ?"
            args = (category,)
        with self._connect() as conn:
            rows = conn.execute(query + " ORDER BY id", args).fetchall()
        return [
            UserRecord(
                id=r["id"],
                name=r["name"],
                phone=r["phone"],
                organisation_name=r["organisation_name"],
                organisation_address=r["organisation_address"],
                category=r["category"],
                email=r["email"],
            )
            for r in rows
        ]

    def create_admin(self, name: str, email: str, password: str) -> int:
        if not password:
            raise ValidationError("password must be non-empty")
        try:
            with self._connect() as conn:
                cur = conn.execute(
                    "INSERT INTO admins (name, email, password_hash) VALUES (?, ?, ?)",
                    (name, email, hash_password(password)),
                )
                return cur.lastrowid
        except sqlite3.IntegrityError as exc:
            raise DuplicateEmail(f"admin email {email!r} already exists") from exc

    def authenticate_admin(self, email: str, password: str) -> str:
        """Return a fresh session token; unknown email and wrong password are
        indistinguishable to the caller."""
        with self._connect() as conn:
            row = conn.execute(
                "SELECT id, password_hash FROM admins WHERE email = ?", (email,)
            ).fetchone()
        stored = row["password_hash"] if row else _DUMMY_HASH
        ok = verify_password(password, stored)
        if row is None or not ok:
            raise InvalidCredentials("invalid email or password")
        token = secrets.token_hex(16)
        expires = self.clock() + self.token_ttl
        with self._connect() as conn:
            conn.execute(
                "INSERT INTO sessions (token, admin_id, expires_at) VALUES (?, ?, ?)",
                (token, row["id"], expires),
            )
        return token

    def validate_token(self, token: str) -> int | None:
        """Admin id for a live token, None otherwise; expired rows are pruned."""
        now = self.clock()
        with self._connect() as conn:
            conn.execute("DELETE FROM sessions WHERE expires_at <= ?", (now,))
            row = conn.execute(
                "SELECT admin_id FROM sessions WHERE token = ?", (token,)
            ).fetchone()
        return row["admin_id"] if row else None

    # -- alert audit log ------------------------------------------------------

    def record_alert(self, row: AlertLogRow) -> int:
        if not row.message.strip():
            raise ValidationError("alert message must be non-empty")
        if row.recipient_count != len(row.statuses):
            raise ValidationError(
                f"recipient_count {row.recipient_count} != {len(row.statuses)} status entries"
            )
        with self._connect() as conn:
            cur = conn.execute(
                "INSERT INTO alerts (created_at, diseases, categories, message, recipient_count)"
                " VALUES (?, ?, ?, ?, ?)",
                (
                    row.timestamp,
                    json.dumps(sorted(row.diseases)),
                    json.dumps(sorted(row.categories)),
                    row.message,
                    row.recipient_count,
                ),
            )
            alert_id = cur.lastrowid
            for status in row.statuses:
                conn.execute(
                    "INSERT INTO alert_deliveries (alert_id, recipient, status, detail)"
                    " VALUES (?, ?, ?, ?)",
                    (alert_id, status.recipient, status.status, status.detail),
                )
        return alert_id

    def get_alert(self, alert_id: int) -> AlertLogRow | None:
        with self._connect() as conn:
            row = conn.execute("SELECT * FROM alerts WHERE id = ?", (alert_id,)).fetchone()
            if row is None:
                return None
            deliveries = conn.execute(
                "SELECT * FROM alert_deliveries WHERE alert_id = ? ORDER BY id", (alert_id,)
            ).fetchall()
        return AlertLogRow(
            id=row["id"],
            timestamp=row["created_at"],
            diseases=frozenset(json.loads(row["diseases"])),
            categories=frozenset(json.loads(row["categories"])),
            message=row["message"],
            recipient_count=row["recipient_count"],
            statuses=tuple(
                DeliveryStatus(recipient=d["recipient"], status=d["status"], detail=d["detail"])
                for d in deliveries
            ),
        )
