"""Multi-day, multi-van simulation of centroid staging and delivery.

Each day is planned before it is executed. Vans coordinate through a
day-scoped claim registry processed in van-id order, so a run is fully
determined by the scenario and its seed. Route planning may fan out over a
thread pool; results are merged in van-id order and are identical to a
sequential run.
"""

from __future__ import annotations

import enum
import hashlib
import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import Unreachable
from .graph import DistanceTable, all_pairs_distances
from .kpis import DayKpis, KpiReport
from .lifecycle import (
    DUE_RESIDENCE,
    Orientation,
    Package,
    Stage,
    age_packages,
    resolve_delivery_attempt,
    reschedule_failed,
    reverse_orientation,
    sample_pickups,
    stage_counts,
)
from .model import AnomalyPolicy, Centroid, ScenarioSpec, VanAgent
from .network import assign_package_centroid, plan_resupply_tour, sample_daily_demand
from .routing import (
    CentroidTour,
    RoutePlanner,
    TourEstimator,
    TourPlan,
    _nn_centroids,
    order_due_centroids,
    plan_centroid_trips,
    select_initial_centroids,
)
from .seeding import BASELINE_DELIVERY_STREAM, DELIVERY_STREAM, PICKUP_STREAM, day_rng

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Event:
    day: int
    event_type: str
    package_id: int | None = None
    van_id: int | None = None
    centroid_id: int | None = None
    node: int | None = None
    value: float | str | None = None


class Claim(enum.Enum):
    CLAIMED = "claimed"
    ALREADY_SERVED = "already_served"


@dataclass
class VisitRegistry:
    day: int
    claims: dict[int, int] = field(default_factory=dict)  # centroid id -> van id


def claim_centroid(registry: VisitRegistry, centroid: int, van: int) -> Claim:
    """First claimant wins the centroid for the day."""
    if centroid in registry.claims:
        return Claim.ALREADY_SERVED
    registry.claims[centroid] = van
    return Claim.CLAIMED


class Anomaly(enum.Enum):
    SURGE = "Surge"
    SUSTAINED_INCREASE = "SustainedIncrease"


def _mean(xs: Sequence[float]) -> float:
    return sum(xs) / len(xs)


def _surge_flags(history: Sequence[int], policy: AnomalyPolicy) -> list[bool]:
    flags = []
    for t, today in enumerate(history):
        trailing = history[max(0, t - policy.window_days) : t]
        flags.append(bool(trailing) and today > policy.surge_factor * _mean(trailing))
    return flags


def _sustained_at(history: Sequence[int], flags: Sequence[bool], t: int, policy: AnomalyPolicy) -> bool:
    w = policy.window_days
    if t + 1 < 2 * w:
        return False
    window = [history[i] for i in range(t - w + 1, t + 1) if not flags[i]]
    prior = [history[i] for i in range(t - 2 * w + 1, t - w + 1) if not flags[i]]
    if not window or not prior:
        return False
    return _mean(window) > policy.sustained_factor * _mean(prior)


def detect_anomaly(history: Sequence[int], policy: AnomalyPolicy) -> Anomaly | None:
    """Classify the latest day of ``history`` (arrival counts, oldest first).

    Surge: today above ``surge_factor`` x the mean of the preceding
    ``window_days`` days. SustainedIncrease: the mean of the last
    ``window_days`` days above ``sustained_factor`` x the mean of the window
    before it, reported only on the day the condition first becomes true.
    Surge days are left out of both window means so a single spike cannot
    masquerade as growth. Surge wins when both hold.
    """
    if not history:
        raise ValueError("empty arrival history")
    flags = _surge_flags(history, policy)
    t = len(history) - 1
    if flags[t]:
        return Anomaly.SURGE
    if _sustained_at(history, flags, t, policy) and not (t > 0 and _sustained_at(history, flags, t - 1, policy)):
        return Anomaly.SUSTAINED_INCREASE
    return None


def promote_for_surge(packages: Iterable[Package], overflow: int, day: int) -> list[Package]:
    """Pull up to ``overflow`` staged, not-yet-due packages into today's deliveries.

    Second-day packages go before first-day ones, then lower id first.
    Packages whose recipients intend to collect them are left alone.
    """
    if overflow <= 0:
        return []
    pool = [
        p
        for p in packages
        if p.stage is Stage.AT_CENTROID
        and p.residence_days < DUE_RESIDENCE
        and not p.pickup_intent
        and p.promoted_day is None
    ]
    pool.sort(key=lambda p: (-p.residence_days, p.id))
    chosen = pool[:overflow]
    for p in chosen:
        p.promoted_day = day
        p.early = True
    return chosen


@dataclass
class SimState:
    day: int = 0
    packages: dict[int, Package] = field(default_factory=dict)
    registry: VisitRegistry = field(default_factory=lambda: VisitRegistry(0))
    orientation: Orientation = Orientation.FORWARD
    vans: list[VanAgent] = field(default_factory=list)
    pending_vans: list[VanAgent] = field(default_factory=list)
    arrivals: list[int] = field(default_factory=list)
    next_id: int = 0
    kpis: list[DayKpis] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)


def apply_scaling(
    state: SimState, anomaly: Anomaly | None, policy: AnomalyPolicy, day: int, arrivals_today: int
) -> list[Package]:
    """React to an anomaly; returns surge-promoted packages.

    Surge: arrivals beyond the fleet's daily capacity (active vans x capacity)
    are offset by promoting that many staged packages. SustainedIncrease: a
    copy of the first van joins from the next day, up to ``max_vans``.
    """
    if anomaly is Anomaly.SURGE:
        capacity = sum(v.capacity for v in state.vans)
        overflow = max(0, arrivals_today - capacity)
        promoted = promote_for_surge(state.packages.values(), overflow, day)
        for p in promoted:
            state.events.append(Event(day, "PROMOTED", p.id, None, p.home_centroid, p.dest, p.residence_days))
        return promoted
    if anomaly is Anomaly.SUSTAINED_INCREASE:
        fleet = state.vans + state.pending_vans
        if len(fleet) >= policy.max_vans:
            log.warning("day %d: fleet capped at %d vans", day, policy.max_vans)
            state.events.append(Event(day, "FLEET_CAPPED", value=len(fleet)))
        else:
            template = min(state.vans, key=lambda v: v.id)
            new = template.clone(max(v.id for v in fleet) + 1)
            state.pending_vans.append(new)
            state.events.append(Event(day, "VAN_ADDED", van_id=new.id, value=day + 1))
    return []


@dataclass
class DayRecord:
    """What happened on one day, kept for audits and verbose dumps."""

    day: int
    anomaly: Anomaly | None = None
    due_centroids: tuple[int, ...] = ()
    starts: dict[int, int] = field(default_factory=dict)
    claims: dict[int, int] = field(default_factory=dict)
    tours: dict[int, CentroidTour] = field(default_factory=dict)
    plans: dict[int, TourPlan] = field(default_factory=dict)
    executed_minutes: dict[int, float] = field(default_factory=dict)
    resupply: object | None = None
    attempts: dict[int, int] = field(default_factory=dict)  # package id -> centroid it was billed to
    counts: dict[str, int] = field(default_factory=dict)
    created: int = 0


@dataclass
class SimResult:
    report: KpiReport
    events: list[Event]
    days: list[DayRecord]
    packages: dict[int, Package]
    arrival_ids: list[list[int]]


class Simulation:
    def __init__(self, scenario: ScenarioSpec, workers: int = 1, distances: DistanceTable | None = None):
        self.scenario = scenario
        self.workers = max(1, int(workers))
        self.distances = distances or all_pairs_distances(scenario.graph)
        self.centroids = {c.id: c for c in scenario.centroids}
        self.state = SimState(vans=sorted(scenario.vans, key=lambda v: v.id))
        self.days: list[DayRecord] = []
        self.arrival_ids: list[list[int]] = []

    @property
    def depot(self) -> int:
        return self.scenario.dc.node

    def _map(self, fn, items):
        if self.workers == 1 or len(items) < 2:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(fn, items))

    def run(self, days: int | None = None) -> SimResult:
        for _ in range(days or self.scenario.horizon_days):
            self.run_day()
        s = self.state
        return SimResult(KpiReport(s.kpis), s.events, self.days, s.packages, self.arrival_ids)

    def run_day(self) -> DayRecord:
        sc = self.scenario
        st = self.state
        cfg = sc.sim
        day = st.day + 1
        rec = DayRecord(day)
        ev = st.events
        first_event = len(ev)

        if st.pending_vans:
            st.vans = sorted(st.vans + st.pending_vans, key=lambda v: v.id)
            st.pending_vans = []
        st.registry = VisitRegistry(day)

        # arrivals
        new = sample_daily_demand(sc.demand, day, st.next_id)
        st.next_id += len(new)
        self.arrival_ids.append([p.id for p in new])
        for p in new:
            st.packages[p.id] = p
            ev.append(Event(day, "ARRIVAL", p.id, node=p.dest, value=int(p.pickup_intent)))
        st.arrivals.append(len(new))
        anomaly = detect_anomaly(st.arrivals, cfg.anomaly)
        rec.anomaly = anomaly
        if anomaly is not None:
            ev.append(Event(day, _event_name(anomaly), value=len(new)))

        # staging at the nearest centroid
        loads: dict[int, int] = defaultdict(int)
        for p in st.packages.values():
            if p.stage in (Stage.AT_CENTROID, Stage.ROLLED_OVER):
                loads[p.location] += 1
        staged_to: set[int] = set()
        for p in sorted((p for p in st.packages.values() if p.stage is Stage.AT_DC), key=lambda p: p.id):
            try:
                c = assign_package_centroid(
                    p.dest, sc.centroids, self.distances, loads, cfg.centroid_capacity
                )
            except Unreachable as exc:
                ev.append(Event(day, "UNDELIVERABLE", p.id, node=p.dest, value=str(exc)))
                continue
            p.stage_at(c.id, day)
            loads[c.id] += 1
            staged_to.add(c.id)
            ev.append(Event(day, "STAGED", p.id, centroid_id=c.id, node=p.dest))

        # truck resupply of today's receiving centroids
        if staged_to:
            try:
                tour = plan_resupply_tour(sc.dc, [self.centroids[c] for c in sorted(staged_to)], self.distances)
                rec.resupply = tour
                ev.append(Event(day, "RESUPPLY", value=tour.km))
            except Unreachable as exc:
                ev.append(Event(day, "UNDELIVERABLE", value=str(exc)))

        # self pickups, then the residence clock
        for p in sample_pickups(st.packages.values(), day, day_rng(sc.demand.seed, day, PICKUP_STREAM)):
            ev.append(Event(day, "PICKUP", p.id, centroid_id=p.location if p.location is not None else p.home_centroid, node=p.dest))
        due = {p.id: p for p in age_packages(st.packages.values(), day)}
        for p in st.packages.values():
            if p.stage is Stage.ROLLED_OVER and p.due_override == day:
                due[p.id] = p
        for p in apply_scaling(st, anomaly, cfg.anomaly, day, len(new)):
            due[p.id] = p

        # due work billed to each package's home centroid
        due_work: dict[int, list[Package]] = defaultdict(list)
        for pid in sorted(due):
            p = due[pid]
            due_work[p.home_centroid].append(p)
            ev.append(Event(day, "DUE", p.id, centroid_id=p.home_centroid, node=p.dest))
        early_work: dict[int, list[Package]] = defaultdict(list)
        if cfg.early_service:
            for p in sorted(st.packages.values(), key=lambda p: p.id):
                if (
                    p.stage is Stage.AT_CENTROID
                    and p.id not in due
                    and not p.pickup_intent
                    and p.home_centroid not in due_work
                ):
                    early_work[p.home_centroid].append(p)

        due_centroids = [self.centroids[c] for c in sorted(due_work)]
        rec.due_centroids = tuple(c.id for c in due_centroids)
        workloads = {
            cid: _stop_counts(pkgs) for cid, pkgs in list(due_work.items()) + list(early_work.items())
        }
        planner = RoutePlanner(sc.graph, self.distances, self.depot, cfg.lambda_terminal)
        estimator = TourEstimator(planner, workloads)

        starts = select_initial_centroids(st.vans, due_centroids, self.distances, self.depot)
        rec.starts = {v: c.id for v, c in starts.items()}
        for v in st.vans:
            if v.id not in starts:
                if due_centroids:
                    ev.append(Event(day, "VAN_IDLE", van_id=v.id))
        claimed = self._distribute_due(starts, due_centroids, day)

        tours: dict[int, CentroidTour] = {}
        vans = {v.id: v for v in st.vans}
        for vid in sorted(claimed):
            candidates = [
                c for cid, c in sorted(self.centroids.items())
                if cid not in st.registry.claims and cid in early_work
            ]
            tour = order_due_centroids(
                starts[vid], claimed[vid], candidates, vans[vid], self.distances, estimator, st.orientation
            )
            for cid in tour.added:
                claim_centroid(st.registry, cid, vid)
                ev.append(Event(day, "CLAIM", van_id=vid, centroid_id=cid, value="added"))
            if tour.over_shift:
                ev.append(Event(day, "OVER_SHIFT", van_id=vid))
            tours[vid] = tour
        rec.tours = tours
        rec.claims = dict(st.registry.claims)

        plans = dict(
            zip(
                sorted(tours),
                self._map(lambda vid: _safe_plan(planner, tours[vid], workloads, vans[vid]), sorted(tours)),
            )
        )
        rec.plans = {vid: p for vid, p in plans.items() if p is not None}

        # execution
        rng = day_rng(sc.demand.seed, day, DELIVERY_STREAM)
        failed_today: list[Package] = []
        for vid in sorted(tours):
            plan = plans[vid]
            if plan is None:
                for cid in tours[vid].ordered_centroids:
                    for p in due_work.get(cid, []):
                        ev.append(Event(day, "UNDELIVERABLE", p.id, vid, cid, p.dest))
                continue
            minutes, km = self._execute(plan, vans[vid], due_work, early_work, rng, day, rec, failed_today)
            rec.executed_minutes[vid] = minutes
            ev.append(Event(day, "VAN_KM", van_id=vid, value=km))
            ev.append(Event(day, "VAN_MINUTES", van_id=vid, value=minutes))
        for p in sorted(failed_today, key=lambda p: p.id):
            ev.append(Event(day, "ROLLOVER", p.id, p.van, p.location, p.dest, p.rolled_from))
        reschedule_failed(failed_today, day)

        st.kpis.append(compute_kpis(day, ev[first_event:], cfg.emission_g_per_km))
        st.orientation = reverse_orientation(st.orientation)
        st.day = day
        rec.counts = stage_counts(st.packages.values())
        rec.created = len(st.packages)
        self.days.append(rec)
        return rec

    def _distribute_due(self, starts: dict[int, Centroid], due: list[Centroid], day: int) -> dict[int, list[Centroid]]:
        """Round-robin claiming along each van's nearest-neighbour order over all due centroids."""
        st = self.state
        proposals = {vid: _nn_centroids(start, due, self.distances) for vid, start in starts.items()}
        cursor = {vid: 0 for vid in starts}
        claimed: dict[int, list[Centroid]] = {vid: [] for vid in starts}
        open_ids = {c.id for c in due}
        while open_ids:
            progressed = False
            for vid in sorted(starts):
                seq = proposals[vid]
                while cursor[vid] < len(seq):
                    c = seq[cursor[vid]]
                    cursor[vid] += 1
                    if claim_centroid(st.registry, c.id, vid) is Claim.CLAIMED:
                        claimed[vid].append(c)
                        open_ids.discard(c.id)
                        st.events.append(Event(day, "CLAIM", van_id=vid, centroid_id=c.id, value="due"))
                        progressed = True
                        break
                    st.events.append(Event(day, "ALREADY_SERVED", van_id=vid, centroid_id=c.id))
            if not progressed:
                break
        return {vid: cs for vid, cs in claimed.items() if cs}

    def _execute(self, plan, van, due_work, early_work, rng, day, rec, failed_today):
        """Drive the plan, attempt every delivery, and return (minutes, km) actually driven."""
        d = self.distances
        ev = self.state.events
        tour = plan.tour
        minutes = d.time(self.depot, tour.nodes[0])
        km = d.dist_km(self.depot, tour.nodes[0])
        for pos, visit in enumerate(plan.visits):
            early = visit.centroid in tour.added
            pool = defaultdict(list)
            for p in (early_work if early else due_work).get(visit.centroid, []):
                pool[p.dest].append(p)
            here = visit.node
            if not visit.trips and visit.exit_node is not None:
                minutes += d.time(here, visit.exit_node)
                km += d.dist_km(here, visit.exit_node)
            for trip_no, trip in enumerate(visit.trips):
                ev.append(
                    Event(day, "ROUTE", van_id=van.id, centroid_id=visit.centroid, node=trip_no, value=trip.route.cost)
                )
                prev = visit.node
                for stop, count in trip.loads:
                    minutes += d.time(prev, stop) + van.service_time_per_stop
                    km += d.dist_km(prev, stop)
                    prev = stop
                    batch, pool[stop] = pool[stop][:count], pool[stop][count:]
                    for p in batch:
                        p.load(van.id, day)
                        if early:
                            p.early = True
                        rec.attempts[p.id] = visit.centroid
                        outcome = resolve_delivery_attempt(
                            p, self.scenario.sim.success_probability, tour.ordered_centroids, pos, rng, day
                        )
                        if outcome.success:
                            ev.append(Event(day, "EARLY_DELIVERED" if p.early else "DELIVERED", p.id, van.id, visit.centroid, p.dest))
                        else:
                            failed_today.append(p)
                            ev.append(Event(day, "FAILED", p.id, van.id, visit.centroid, p.dest, outcome.reason))
                if trip.end_node is not None:
                    minutes += d.time(prev, trip.end_node)
                    km += d.dist_km(prev, trip.end_node)
        return minutes, km


def _event_name(anomaly: Anomaly) -> str:
    return "SURGE" if anomaly is Anomaly.SURGE else "SUSTAINED_INCREASE"


def _stop_counts(pkgs: Iterable[Package]) -> dict[int, int]:
    counts: dict[int, int] = defaultdict(int)
    for p in pkgs:
        counts[p.dest] += 1
    return dict(counts)


def _safe_plan(planner: RoutePlanner, tour: CentroidTour, workloads, van: VanAgent) -> TourPlan | None:
    try:
        return planner.plan_tour(tour, workloads, van)
    except Unreachable:
        return None


def run_simulation(scenario: ScenarioSpec, workers: int = 1, days: int | None = None) -> SimResult:
    return Simulation(scenario, workers=workers).run(days)


def compute_kpis(day: int, events: Iterable[Event], emission_g_per_km: float) -> DayKpis:
    """One day's KPI increment, derived from that day's events alone."""
    k = DayKpis(day)
    van_km = 0.0
    for e in events:
        if e.day != day:
            continue
        t = e.event_type
        if t == "ARRIVAL":
            k.arrivals += 1
        elif t == "PICKUP":
            k.pickups += 1
        elif t in ("DELIVERED", "EARLY_DELIVERED"):
            k.deliveries += 1
        elif t == "FAILED":
            k.failed_attempts += 1
        elif t == "ROUTE":
            k.eq4_cost += e.value
        elif t == "RESUPPLY":
            k.resupply_km += e.value
        elif t == "VAN_KM":
            van_km += e.value
            k.vans_used += 1
        elif t == "VAN_MINUTES":
            k.van_hours += e.value / 60.0
    k.distance_km = van_km + k.resupply_km
    return k.finalize(emission_g_per_km)


def check_conservation(record: DayRecord) -> bool:
    counts = record.counts
    return sum(counts.values()) == record.created and counts["OutForDelivery"] == 0


def run_baseline_direct(scenario: ScenarioSpec, days: int | None = None) -> SimResult:
    """Same arrival stream, no centroids: every package leaves the DC on its arrival day.

    All packages ride in capacity-sized trips out of the DC, planned with the
    same route objective (pulled back toward the DC) and handed to vans in
    turn. Failed packages return to the DC and go out again the next day.
    """
    distances = all_pairs_distances(scenario.graph)
    depot = scenario.dc.node
    vans = sorted(scenario.vans, key=lambda v: v.id)
    template = vans[0]
    cfg = scenario.sim
    packages: dict[int, Package] = {}
    events: list[Event] = []
    kpis: list[DayKpis] = []
    records: list[DayRecord] = []
    arrival_ids: list[list[int]] = []
    next_id = 0
    horizon = days or scenario.horizon_days
    for day in range(1, horizon + 1):
        rec = DayRecord(day)
        first_event = len(events)
        new = sample_daily_demand(scenario.demand, day, next_id)
        next_id += len(new)
        arrival_ids.append([p.id for p in new])
        for p in new:
            packages[p.id] = p
            events.append(Event(day, "ARRIVAL", p.id, node=p.dest, value=int(p.pickup_intent)))
        waiting = sorted((p for p in packages.values() if p.stage is Stage.AT_DC), key=lambda p: p.id)
        demand = _stop_counts(waiting)
        try:
            trips = plan_centroid_trips(depot, demand, depot, template, distances, cfg.lambda_terminal)
        except Unreachable as exc:
            trips = ()
            for p in waiting:
                events.append(Event(day, "UNDELIVERABLE", p.id, node=p.dest, value=str(exc)))
        pool: dict[int, list[Package]] = defaultdict(list)
        for p in waiting:
            pool[p.dest].append(p)
        rng = day_rng(scenario.demand.seed, day, BASELINE_DELIVERY_STREAM)
        van_minutes: dict[int, float] = defaultdict(float)
        van_km: dict[int, float] = defaultdict(float)
        for k, trip in enumerate(trips):
            van = vans[k % len(vans)]
            r = trip.route
            van_km[van.id] += r.distance_km + distances.dist_km(r.ordered_stops[-1], depot)
            van_minutes[van.id] += (
                r.duration_minutes
                + van.service_time_per_stop * len(r.ordered_stops)
                + distances.time(r.ordered_stops[-1], depot)
            )
            events.append(Event(day, "ROUTE", van_id=van.id, node=k, value=r.cost))
            for stop, count in trip.loads:
                batch, pool[stop] = pool[stop][:count], pool[stop][count:]
                for p in batch:
                    p.load(van.id, day)
                    if rng.random() < cfg.success_probability:
                        p.stage = Stage.DELIVERED
                        p.closed_day = day
                        events.append(Event(day, "DELIVERED", p.id, van.id, node=p.dest))
                    else:
                        p.stage = Stage.AT_DC
                        p.failures += 1
                        events.append(Event(day, "FAILED", p.id, van.id, node=p.dest, value="recipient unavailable"))
        for vid in sorted(van_km):
            events.append(Event(day, "VAN_KM", van_id=vid, value=van_km[vid]))
            events.append(Event(day, "VAN_MINUTES", van_id=vid, value=van_minutes[vid]))
        rec.executed_minutes = dict(van_minutes)
        rec.counts = stage_counts(packages.values())
        rec.created = len(packages)
        kpis.append(compute_kpis(day, events[first_event:], cfg.emission_g_per_km))
        records.append(rec)
    return SimResult(KpiReport(kpis), events, records, packages, arrival_ids)


def arrival_digest(arrival_ids: Sequence[Sequence[int]]) -> str:
    """Short fingerprint of a per-day arrival id stream."""
    h = hashlib.sha256()
    for day, ids in enumerate(arrival_ids, start=1):
        h.update(f"{day}:{','.join(map(str, ids))};".encode())
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class Comparison:
    centroid: SimResult
    direct: SimResult

    def rows(self) -> list[tuple[str, float | str, float | str]]:
        a = self.centroid.report.total()
        b = self.direct.report.total()
        out: list[tuple[str, float | str, float | str]] = [(k, a[k], b[k]) for k in a]
        out.append(("arrival_stream", arrival_digest(self.centroid.arrival_ids), arrival_digest(self.direct.arrival_ids)))
        if b["eq4_cost"] > 0:
            out.append(("eq4_cost_saving_pct", 100.0 * (1 - a["eq4_cost"] / b["eq4_cost"]), 0.0))
        if b["distance_km"] > 0:
            out.append(("distance_saving_pct", 100.0 * (1 - a["distance_km"] / b["distance_km"]), 0.0))
        return out


def compare_strategies(scenario: ScenarioSpec, workers: int = 1, days: int | None = None) -> Comparison:
    return Comparison(
        run_simulation(scenario, workers=workers, days=days),
        run_baseline_direct(scenario, days=days),
    )


def stream_identical(cmp: Comparison) -> bool:
    return cmp.centroid.arrival_ids == cmp.direct.arrival_ids
