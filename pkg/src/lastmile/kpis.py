"""Per-day and total KPI records."""

from __future__ import annotations

from dataclasses import dataclass, fields

ADDITIVE = (
    "arrivals",
    "distance_km",
    "resupply_km",
    "eq4_cost",
    "vans_used",
    "deliveries",
    "pickups",
    "failed_attempts",
    "van_hours",
    "co2_grams",
)


@dataclass
class DayKpis:
    day: int
    arrivals: int = 0
    distance_km: float = 0.0  # van km + resupply km
    resupply_km: float = 0.0
    eq4_cost: float = 0.0
    vans_used: int = 0
    deliveries: int = 0
    pickups: int = 0
    failed_attempts: int = 0
    van_hours: float = 0.0
    deliveries_per_hour: float = 0.0
    co2_grams: float = 0.0

    def finalize(self, emission_g_per_km: float) -> "DayKpis":
        self.co2_grams = self.distance_km * emission_g_per_km
        self.deliveries_per_hour = self.deliveries / self.van_hours if self.van_hours > 0 else 0.0
        return self


@dataclass
class KpiReport:
    days: list[DayKpis]

    def total(self) -> dict[str, float]:
        """Sums of the additive fields; the rate is recomputed from the sums."""
        out: dict[str, float] = {name: sum(getattr(d, name) for d in self.days) for name in ADDITIVE}
        out["deliveries_per_hour"] = out["deliveries"] / out["van_hours"] if out["van_hours"] > 0 else 0.0
        return out

    @staticmethod
    def columns() -> list[str]:
        return [f.name for f in fields(DayKpis)]
