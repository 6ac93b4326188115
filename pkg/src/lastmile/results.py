"""Results bundle: KPI, event, comparison and route CSVs plus run metadata."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .kpis import KpiReport
from .simulation import Comparison, Event, SimResult

EVENT_COLUMNS = ["day", "event_type", "package_id", "van_id", "centroid_id", "node", "value"]
ROUTE_COLUMNS = [
    "day", "van_id", "position", "centroid_id", "trip", "stops", "cost", "distance_km", "duration_minutes", "terminal_km",
]


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def kpi_csv(report: KpiReport) -> str:
    cols = KpiReport.columns()
    rows = [[getattr(d, c) for c in cols] for d in report.days]
    if report.days:
        total = report.total()
        rows.append(["total", *(total[c] for c in cols[1:])])
    return _csv(cols, rows)


def sorted_events(events: list[Event]) -> list[Event]:
    # stable: within a (day, package) group the emission order is kept
    return sorted(events, key=lambda e: (e.day, -1 if e.package_id is None else e.package_id))


def events_csv(events: list[Event]) -> str:
    return _csv(EVENT_COLUMNS, ([getattr(e, c) for c in EVENT_COLUMNS] for e in sorted_events(events)))


def comparison_csv(cmp: Comparison) -> str:
    return _csv(["metric", "centroid", "direct"], cmp.rows())


def routes_csv(result: SimResult) -> str:
    rows = []
    for rec in result.days:
        for vid in sorted(rec.plans):
            plan = rec.plans[vid]
            for pos, visit in enumerate(plan.visits):
                for k, trip in enumerate(visit.trips):
                    r = trip.route
                    rows.append(
                        [
                            rec.day, vid, pos, visit.centroid, k, " ".join(map(str, r.ordered_stops)),
                            r.cost, r.distance_km, r.duration_minutes, r.terminal_km,
                        ]
                    )
    return _csv(ROUTE_COLUMNS, rows)


@dataclass
class ResultsBundle:
    result: SimResult
    seed: int
    config_hash: str
    comparison: Comparison | None = None
    verbose: bool = False

    def files(self) -> dict[str, str]:
        out = {
            "kpis.csv": kpi_csv(self.result.report),
            "events.csv": events_csv(self.result.events),
        }
        if self.comparison is not None:
            out["comparison.csv"] = comparison_csv(self.comparison)
        if self.verbose:
            out["routes.csv"] = routes_csv(self.result)
        meta = {
            "seed": self.seed,
            "version": __version__,
            "config_hash": self.config_hash,
            "days": len(self.result.report.days),
        }
        out["run_meta.json"] = json.dumps(meta, indent=2, sort_keys=True) + "\n"
        return out


def write_results(bundle: ResultsBundle, out_dir: str | Path) -> list[Path]:
    """Render every file first, then write them all; returns the written paths."""
    files = bundle.files()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name in sorted(files):
        p = out / name
        p.write_text(files[name], encoding="utf-8")
        paths.append(p)
    return paths
