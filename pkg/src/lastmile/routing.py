"""Daily van routing.

Van start selection by dispersion, nearest-neighbour centroid tours that grow
while the shift allows, and per-centroid neighbourhood routes priced as
``fixed_cost + variable_cost * km`` plus a terminal pull toward the next
centroid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Mapping, Sequence

from .errors import TooLarge, Unreachable
from .graph import DistanceTable, Path, RoadGraph, shortest_path
from .lifecycle import Orientation
from .model import Centroid, VanAgent
from .tours import brute_force_path, improve_path, nearest_neighbour, path_cost

BRUTE_FORCE_LIMIT = 9


@dataclass(frozen=True)
class NeighborhoodRouteProblem:
    origin: int
    stops: tuple[int, ...]
    vehicle: VanAgent
    distances: DistanceTable
    next_centroid: int | None = None
    lambda_terminal: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "stops", tuple(self.stops))


@dataclass(frozen=True)
class NeighborhoodRoute:
    ordered_stops: tuple[int, ...]
    cost: float
    distance_km: float
    duration_minutes: float
    terminal_km: float = 0.0

    @property
    def dispatched(self) -> bool:
        return bool(self.ordered_stops)


EMPTY_ROUTE = NeighborhoodRoute((), 0.0, 0.0, 0.0)


def route_from_order(problem: NeighborhoodRouteProblem, order: Sequence[int]) -> NeighborhoodRoute:
    """Price a given stop sequence under the route objective."""
    if not order:
        return EMPTY_ROUTE
    d = problem.distances
    km = 0.0
    minutes = 0.0
    prev = problem.origin
    for s in order:
        km += d.dist_km(prev, s)
        minutes += d.time(prev, s)
        prev = s
    terminal = d.dist_km(prev, problem.next_centroid) if problem.next_centroid is not None else 0.0
    van = problem.vehicle
    cost = van.fixed_cost + van.variable_cost * (km + problem.lambda_terminal * terminal)
    return NeighborhoodRoute(tuple(order), cost, km, minutes, terminal)


def _local_matrix(problem: NeighborhoodRouteProblem):
    nodes = [problem.origin, *problem.stops]
    if problem.next_centroid is not None:
        nodes.append(problem.next_centroid)
    if not problem.distances.covers(nodes):
        raise ValueError("distance table does not cover every route node")
    km = problem.distances.submatrix(nodes, "km")
    end = len(nodes) - 1 if problem.next_centroid is not None else None
    stop_idx = range(1, len(problem.stops) + 1)
    # only legs a route can use: origin->stop, stop->stop, stop->end
    for i in [0, *stop_idx]:
        for j in [*stop_idx, *([end] if end is not None else [])]:
            if i != j and not (i == 0 and j == end) and math.isinf(km[i][j]):
                raise Unreachable(f"no road from node {nodes[i]} to node {nodes[j]}")
    return nodes, km, end


def _solve(problem: NeighborhoodRouteProblem) -> NeighborhoodRoute:
    if not problem.stops:
        return EMPTY_ROUTE
    nodes, km, end = _local_matrix(problem)
    items = list(range(1, len(problem.stops) + 1))
    order = nearest_neighbour(km, 0, items)
    order = improve_path(order, km, 0, end, problem.lambda_terminal)
    return route_from_order(problem, [nodes[i] for i in order])


def plan_neighborhood_route(problem: NeighborhoodRouteProblem) -> NeighborhoodRoute:
    """NN construction followed by 2-opt / or-opt descent on the full objective."""
    if len(problem.stops) > problem.vehicle.capacity:
        raise ValueError(
            f"{len(problem.stops)} stops exceed capacity {problem.vehicle.capacity}; split into trips first"
        )
    if len(set(problem.stops)) != len(problem.stops):
        raise ValueError("duplicate stops")
    return _solve(problem)


def brute_force_route_oracle(problem: NeighborhoodRouteProblem) -> NeighborhoodRoute:
    """Exact optimum by enumerating every stop permutation (at most 9 stops)."""
    if len(problem.stops) > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"{len(problem.stops)} stops; enumeration is limited to {BRUTE_FORCE_LIMIT}")
    if not problem.stops:
        return EMPTY_ROUTE
    nodes, km, end = _local_matrix(problem)
    order, _ = brute_force_path(km, 0, list(range(1, len(nodes) - (end is not None))), end, problem.lambda_terminal)
    return route_from_order(problem, [nodes[i] for i in order])


@dataclass(frozen=True)
class Trip:
    """One loaded run out of a centroid.

    ``end_node`` is where the van heads afterwards: back to the centroid to
    reload, the next centroid, the depot, or nowhere (``None``).
    """

    origin: int
    route: NeighborhoodRoute
    end_node: int | None
    loads: tuple[tuple[int, int], ...]  # (stop node, packages) in visit order


def plan_centroid_trips(
    origin: int,
    demand: Mapping[int, int],
    next_node: int | None,
    van: VanAgent,
    distances: DistanceTable,
    lambda_terminal: float = 1.0,
) -> tuple[Trip, ...]:
    """Serve ``demand`` (stop node -> package count) from ``origin``.

    When the packages exceed the van capacity, one route over every stop is
    cut into consecutive capacity-sized pieces; each piece becomes a trip
    returning to ``origin`` (the last one heads to ``next_node``) and is
    re-optimised on its own.
    """
    demand = {int(n): int(c) for n, c in demand.items() if c > 0}
    if not demand:
        return ()
    stops = tuple(sorted(demand))
    total = sum(demand.values())
    if total <= van.capacity:
        route = _solve(NeighborhoodRouteProblem(origin, stops, van, distances, next_node, lambda_terminal))
        return (Trip(origin, route, next_node, tuple((s, demand[s]) for s in route.ordered_stops)),)

    giant = _solve(NeighborhoodRouteProblem(origin, stops, van, distances, next_node, lambda_terminal))
    chunks: list[dict[int, int]] = [{}]
    room = van.capacity
    for s in giant.ordered_stops:
        left = demand[s]
        while left:
            if room == 0:
                chunks.append({})
                room = van.capacity
            take = min(left, room)
            chunks[-1][s] = chunks[-1].get(s, 0) + take
            left -= take
            room -= take
    trips = []
    for k, chunk in enumerate(chunks):
        end = next_node if k == len(chunks) - 1 else origin
        problem = NeighborhoodRouteProblem(origin, tuple(sorted(chunk)), van, distances, end, lambda_terminal)
        route = _solve(problem)
        trips.append(Trip(origin, route, end, tuple((s, chunk[s]) for s in route.ordered_stops)))
    return tuple(trips)


@dataclass(frozen=True)
class CentroidTour:
    van: int
    ordered_centroids: tuple[int, ...]
    nodes: tuple[int, ...]
    approach_path: Path | None
    orientation: Orientation = Orientation.FORWARD
    over_shift: bool = False
    added: tuple[int, ...] = ()  # non-due centroids taken on to fill the shift


@dataclass(frozen=True)
class Visit:
    centroid: int
    node: int
    trips: tuple[Trip, ...]
    exit_node: int | None


@dataclass(frozen=True)
class TourPlan:
    tour: CentroidTour
    visits: tuple[Visit, ...]
    minutes: float
    km: float
    cost: float


class RoutePlanner:
    """Plans trips and whole tours over one day's distance table, memoising trips.

    Vans start at ``depot``; with ``return_to_depot`` they also finish there,
    so the last centroid's routes are pulled toward the depot.
    """

    def __init__(
        self,
        graph: RoadGraph,
        distances: DistanceTable,
        depot: int,
        lambda_terminal: float = 1.0,
        return_to_depot: bool = True,
    ):
        self.graph = graph
        self.distances = distances
        self.depot = depot
        self.lambda_terminal = lambda_terminal
        self.return_to_depot = return_to_depot
        self._trips: dict = {}

    def trips(self, origin: int, demand: Mapping[int, int], next_node: int | None, van: VanAgent) -> tuple[Trip, ...]:
        key = (origin, tuple(sorted(demand.items())), next_node, van)
        hit = self._trips.get(key)
        if hit is None:
            hit = plan_centroid_trips(origin, demand, next_node, van, self.distances, self.lambda_terminal)
            self._trips[key] = hit
        return hit

    def approach(self, node: int) -> Path:
        return shortest_path(self.graph, self.depot, node)

    def make_tour(
        self,
        van: VanAgent,
        centroids: Sequence[Centroid],
        orientation: Orientation = Orientation.FORWARD,
        added: Sequence[int] = (),
        over_shift: bool = False,
    ) -> CentroidTour:
        seq = list(centroids)
        if orientation is Orientation.REVERSED:
            seq.reverse()
        return CentroidTour(
            van=van.id,
            ordered_centroids=tuple(c.id for c in seq),
            nodes=tuple(c.node for c in seq),
            approach_path=self.approach(seq[0].node) if seq else None,
            orientation=orientation,
            over_shift=over_shift,
            added=tuple(added),
        )

    def plan_tour(self, tour: CentroidTour, workloads: Mapping[int, Mapping[int, int]], van: VanAgent) -> TourPlan:
        if not tour.ordered_centroids:
            return TourPlan(tour, (), 0.0, 0.0, 0.0)
        d = self.distances
        minutes = tour.approach_path.cost
        km = d.dist_km(self.depot, tour.nodes[0])
        cost = 0.0
        visits = []
        n = len(tour.nodes)
        for k, (cid, node) in enumerate(zip(tour.ordered_centroids, tour.nodes)):
            if k + 1 < n:
                exit_node = tour.nodes[k + 1]
            else:
                exit_node = self.depot if self.return_to_depot else None
            trips = self.trips(node, workloads.get(cid, {}), exit_node, van)
            visits.append(Visit(cid, node, trips, exit_node))
            if not trips:
                if exit_node is not None:
                    minutes += d.time(node, exit_node)
                    km += d.dist_km(node, exit_node)
                continue
            for trip in trips:
                r = trip.route
                minutes += r.duration_minutes + van.service_time_per_stop * len(r.ordered_stops)
                km += r.distance_km
                cost += r.cost
                if trip.end_node is not None:
                    last = r.ordered_stops[-1]
                    minutes += d.time(last, trip.end_node)
                    km += d.dist_km(last, trip.end_node)
        return TourPlan(tour, tuple(visits), minutes, km, cost)


def estimate_tour_time(
    tour: CentroidTour,
    workloads: Mapping[int, Mapping[int, int]],
    van: VanAgent,
    distances: DistanceTable | None = None,
    planner: RoutePlanner | None = None,
) -> float:
    """Minutes from leaving the depot to the end of the tour.

    Approach leg, then per centroid: route driving, per-stop service and the
    leg onward (to reload, to the next centroid, or home). ``workloads`` maps
    centroid id -> {stop node: packages}.
    """
    if not tour.ordered_centroids:
        return 0.0
    if planner is None:
        raise ValueError("a RoutePlanner is needed for non-empty tours")
    if distances is not None and distances is not planner.distances:
        raise ValueError("planner was built over a different distance table")
    return planner.plan_tour(tour, workloads, van).minutes


@dataclass
class TourEstimator:
    """Workload-aware estimator handed to :func:`order_due_centroids`."""

    planner: RoutePlanner
    workloads: Mapping[int, Mapping[int, int]]
    calls: int = field(default=0, repr=False)

    def __call__(self, tour: CentroidTour, van: VanAgent) -> float:
        self.calls += 1
        return estimate_tour_time(tour, self.workloads, van, planner=self.planner)

    def has_work(self, centroid_id: int) -> bool:
        return any(c > 0 for c in self.workloads.get(centroid_id, {}).values())


def _nn_centroids(start: Centroid, members: Sequence[Centroid], distances: DistanceTable) -> list[Centroid]:
    ordered = [start]
    rest = sorted((c for c in members if c.id != start.id), key=lambda c: c.id)
    while rest:
        cur = ordered[-1].node
        nxt = min(rest, key=lambda c: (distances.time(cur, c.node), c.id))
        ordered.append(nxt)
        rest.remove(nxt)
    return ordered


def order_due_centroids(
    start: Centroid,
    due: Sequence[Centroid],
    candidates: Sequence[Centroid],
    van: VanAgent,
    distances: DistanceTable,
    est: TourEstimator,
    orientation: Orientation = Orientation.FORWARD,
) -> CentroidTour:
    """Nearest-neighbour tour over ``due`` from ``start``, grown while the shift allows.

    While the estimate is under ``van.shift_minutes``, the candidate closest
    to any tour member (lowest id on ties) that still fits is added and the
    whole order recomputed. Candidates without work are never added.
    """
    members = list({c.id: c for c in [start, *due]}.values())
    planner = est.planner

    def build(ms: list[Centroid], added: list[int]) -> CentroidTour:
        return planner.make_tour(van, _nn_centroids(start, ms, distances), orientation, added)

    added: list[int] = []
    tour = build(members, added)
    minutes = est(tour, van)
    if minutes > van.shift_minutes:
        return planner.make_tour(
            van, _nn_centroids(start, members, distances), orientation, added, over_shift=True
        )
    while minutes < van.shift_minutes:
        ids = {c.id for c in members}
        pool = [c for c in candidates if c.id not in ids and est.has_work(c.id)]
        pool.sort(key=lambda c: (min(distances.time(m.node, c.node) for m in members), c.id))
        for c in pool:
            trial = build(members + [c], added + [c.id])
            t = est(trial, van)
            if t <= van.shift_minutes:
                members.append(c)
                added.append(c.id)
                tour, minutes = trial, t
                break
        else:
            break
    return tour


def _chain(seq: Sequence[Centroid], distances: DistanceTable) -> float:
    return sum(distances.time(a.node, b.node) for a, b in zip(seq, seq[1:]))


def _brute_force_dispersion(cands: Sequence[Centroid], p: int, distances: DistanceTable) -> list[Centroid]:
    best: tuple[float, tuple[int, ...]] | None = None
    best_seq: list[Centroid] = []
    for seq in permutations(cands, p):
        key = (-_chain(seq, distances), tuple(c.id for c in seq))
        if best is None or key < best:
            best, best_seq = key, list(seq)
    return best_seq


def _greedy_dispersion(cands: Sequence[Centroid], p: int, distances: DistanceTable) -> list[Centroid]:
    pair = _brute_force_dispersion(cands, 2, distances)
    chain = list(pair)
    rest = [c for c in cands if c.id not in {x.id for x in chain}]
    while len(chain) < p and rest:
        base = _chain(chain, distances)
        best = None
        for c in rest:
            for pos in range(len(chain) + 1):
                trial = chain[:pos] + [c] + chain[pos:]
                key = (-(_chain(trial, distances) - base), c.id, pos)
                if best is None or key < best[0]:
                    best = (key, trial, c)
        chain = best[1]
        rest.remove(best[2])
    return chain


def select_initial_centroids(
    vans: Sequence[VanAgent],
    due_centroids: Sequence[Centroid],
    distances: DistanceTable,
    depot: int,
    exact_vans: int = 3,
    exact_candidates: int = 10,
) -> dict[int, Centroid]:
    """Starting centroid per van id, spreading vans apart.

    Chooses the ordered selection maximising the summed travel time between
    consecutive picks (lowest id tuple on ties), by enumeration for small
    cases and greedy farthest insertion otherwise. The k-th van by id gets the
    k-th pick. A single pick is the due centroid nearest the depot. Vans
    beyond the number of due centroids get no entry.
    """
    cands = sorted({c.id: c for c in due_centroids}.values(), key=lambda c: c.id)
    ordered_vans = sorted(vans, key=lambda v: v.id)
    if not cands or not ordered_vans:
        return {}
    p = min(len(ordered_vans), len(cands))
    if p == 1:
        picks = [min(cands, key=lambda c: (distances.time(depot, c.node), c.id))]
    elif p <= exact_vans and len(cands) <= exact_candidates:
        picks = _brute_force_dispersion(cands, p, distances)
    else:
        picks = _greedy_dispersion(cands, p, distances)
    return {van.id: c for van, c in zip(ordered_vans, picks)}

