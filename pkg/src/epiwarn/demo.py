"""Deterministic synthetic dataset: 260 weeks of plausible seasonal data.

Used by the seed-demo CLI command and by the end-to-end tests; no real-world
data ships with the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DuplicateEmail
from .store import DiseaseWeekRow, Store, UserRecord
from .weeks import Disease, WeekKey

DEMO_ADMIN_EMAIL = "admin@example.org"
DEMO_ADMIN_PASSWORD = "demo-password"

DEMO_USERS = (
    UserRecord(None, "Asha Nair", "+12125550101", "Midtown Pharmacy", "12 W 31st St", "pharmacy", "asha@midtownpharmacy.example"),
    UserRecord(None, "Ben Okafor", "+12125550102", "Harbor Pharmacy", "3 Front St", "pharmacy", "ben@harborpharmacy.example"),
    UserRecord(None, "Carla Reyes", "+12125550103", "Riverside Hospital", "400 River Rd", "hospital", "carla@riversidehospital.example"),
)


@dataclass(frozen=True)
class _Profile:
    base: float
    amplitude: float
    peak_week: float  # week-of-year where incidence peaks
    noise: float
    tweet_scale: float


_PROFILES = {
    Disease.INFLUENZA: _Profile(base=900.0, amplitude=700.0, peak_week=2.0, noise=60.0, tweet_scale=0.08),
    Disease.MALARIA: _Profile(base=45.0, amplitude=28.0, peak_week=30.0, noise=4.0, tweet_scale=0.6),
    Disease.HEPATITIS: _Profile(base=70.0, amplitude=18.0, peak_week=20.0, noise=6.0, tweet_scale=0.4),
}


def demo_week_rows(disease: Disease, weeks: int = 260, start: WeekKey = WeekKey(2017, 1), seed: int = 0) -> list[DiseaseWeekRow]:
    """Seasonal incidence plus correlated non-clinical features."""
    profile = _PROFILES[disease]
    rng = np.random.default_rng(seed + 1000 * list(Disease).index(disease))
    rows = []
    week = start
    for t in range(weeks):
        phase = 2.0 * math.pi * (t - profile.peak_week) / 52.0
        cases = profile.base + profile.amplitude * math.cos(phase) + rng.normal(0.0, profile.noise)
        cases = max(0, int(round(cases)))
        temperature = 12.0 + 11.0 * math.sin(2.0 * math.pi * (t - 15.0) / 52.0) + rng.normal(0.0, 1.5)
        precipitation = max(0.0, rng.gamma(shape=2.0, scale=1.4))
        seasonal_interest = (cases - profile.base) / max(profile.amplitude, 1.0)
        search_volume = float(np.clip(50.0 + 40.0 * seasonal_interest + rng.normal(0.0, 5.0), 0.0, 100.0))
        tweet_count = int(rng.poisson(max(cases * profile.tweet_scale, 1.0)))
        rows.append(
            DiseaseWeekRow(
                id=None,
                week=week,
                precipitation=round(precipitation, 2),
                temperature=round(temperature, 2),
                search_volume=round(search_volume, 1),
                tweet_count=tweet_count,
                cases=cases,
            )
        )
        week = week.next()
    return rows


def seed_demo(store: Store, weeks: int = 260, seed: int = 0) -> dict:
    """Populate a migrated store with the synthetic dataset, a demo admin, and
    demo recipients (two pharmacies and one hospital)."""
    store.migrate()
    for disease in Disease:
        for row in demo_week_rows(disease, weeks=weeks, seed=seed):
            store.upsert_week(disease, row)
    admins_created = 0
    try:
        store.create_admin("Demo Admin", DEMO_ADMIN_EMAIL, DEMO_ADMIN_PASSWORD)
        admins_created = 1
    except DuplicateEmail:
        pass  # reseeding an existing demo store keeps the original admin
    users_created = 0
    for user in DEMO_USERS:
        try:
            store.register_user(user)
            users_created += 1
        except DuplicateEmail:
            pass
    return {
        "weeks_per_disease": weeks,
        "admin_email": DEMO_ADMIN_EMAIL,
        "admins_created": admins_created,
        "users_created": users_created,
    }
