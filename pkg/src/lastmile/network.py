"""Centroid network: package staging, DC resupply tours, scenario and demand generation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.spatial import Delaunay

from .errors import InvalidParams, Unreachable
from .graph import DistanceTable, RoadGraph
from .lifecycle import Package
from .model import (
    AnomalyPolicy,
    Centroid,
    DemandModel,
    DistributionCenter,
    ScenarioSpec,
    SimConfig,
    VanAgent,
)
from .seeding import DEMAND_STREAM, GENERATOR_STREAM, day_rng
from .tours import held_karp_tour, improve_path, nearest_neighbour, path_cost


def assign_package_centroid(
    dest: int,
    centroids: Sequence[Centroid],
    distances: DistanceTable,
    loads: Mapping[int, int] | None = None,
    capacity: float = math.inf,
) -> Centroid:
    """Nearest centroid by travel time from centroid to ``dest``; lowest id on ties.

    With a finite ``capacity``, centroids whose current ``loads`` are full are
    skipped.
    """
    if not centroids:
        raise ValueError("no centroids")
    best: Centroid | None = None
    best_d = math.inf
    for c in sorted(centroids, key=lambda c: c.id):
        if loads is not None and loads.get(c.id, 0) >= capacity:
            continue
        d = distances.time(c.node, dest)
        if d < best_d:
            best, best_d = c, d
    if best is None:
        raise Unreachable(f"no centroid with spare capacity reaches node {dest}")
    return best


@dataclass(frozen=True)
class ResupplyTour:
    stops: tuple[int, ...]  # centroid ids in visiting order
    nodes: tuple[int, ...]  # DC node, centroid nodes..., DC node
    minutes: float
    km: float
    open_minutes: float  # same order without the final return leg


def plan_resupply_tour(
    dc: DistributionCenter,
    targets: Sequence[Centroid],
    distances: DistanceTable,
    exact_limit: int = 10,
) -> ResupplyTour:
    """Closed DC tour through every target: exact up to ``exact_limit`` stops, else NN + local search."""
    if not targets:
        raise ValueError("no resupply targets")
    targets = sorted({c.id: c for c in targets}.values(), key=lambda c: c.id)
    nodes = [dc.node] + [c.node for c in targets]
    cost = distances.submatrix(nodes)
    for i in range(1, len(nodes)):
        if math.isinf(cost[0][i]) or math.isinf(cost[i][0]):
            raise Unreachable(f"centroid {targets[i - 1].id} is disconnected from the DC")
    items = list(range(1, len(nodes)))
    if len(items) <= exact_limit:
        order, _ = held_karp_tour(cost, 0, items)
    else:
        order = improve_path(nearest_neighbour(cost, 0, items), cost, 0, 0)
    minutes = path_cost(order, cost, 0, 0)
    km_cost = distances.submatrix(nodes, "km")
    return ResupplyTour(
        stops=tuple(targets[i - 1].id for i in order),
        nodes=(dc.node, *(nodes[i] for i in order), dc.node),
        minutes=minutes,
        km=path_cost(order, km_cost, 0, 0),
        open_minutes=path_cost(order, cost, 0),
    )


def _annulus(rng: np.random.Generator, inner: float, outer: float, size: int, angles=None):
    # area-uniform radius; inner bound exclusive
    u = rng.uniform(0.0, 1.0, size)
    r = np.sqrt(outer**2 - u * (outer**2 - inner**2))
    theta = rng.uniform(0.0, 2 * math.pi, size) if angles is None else angles
    return r * np.cos(theta), r * np.sin(theta)


def _planar_edges(points: np.ndarray) -> list[tuple[int, int]]:
    n = len(points)
    if n < 2:
        return []
    try:
        tri = Delaunay(points)
    except Exception:  # degenerate (collinear / too few points)
        order = np.lexsort((points[:, 1], points[:, 0]))
        return sorted((min(a, b), max(a, b)) for a, b in zip(order, order[1:]))
    edges = set()
    for simplex in tri.simplices:
        for a in range(3):
            u, v = int(simplex[a]), int(simplex[(a + 1) % 3])
            edges.add((min(u, v), max(u, v)))
    return sorted(edges)


def generate_scenario(
    radii: Sequence[float],
    n_centroids: int,
    n_destinations: int,
    n_vans: int,
    seed: int,
    mean_daily_packages: float = 40.0,
    minutes_per_km: float = 2.0,
    horizon_days: int = 30,
    van_template: VanAgent | None = None,
    cluster_spread: float = 0.35,
) -> ScenarioSpec:
    """Concentric-ring synthetic scenario.

    Node 0 is the DC (radius <= r1), nodes 1..C the centroids (r1 < radius <= r3)
    and the remaining nodes destinations (r3 < radius <= r4), each angularly
    clustered around a centroid. The road network is the Delaunay triangulation
    of all points with travel time ``minutes_per_km`` x Euclidean km.
    """
    radii = [float(r) for r in radii]
    if len(radii) != 4 or any(b <= a for a, b in zip(radii, radii[1:])) or radii[0] <= 0:
        raise InvalidParams(f"radii must be 4 strictly increasing positive values, got {radii}")
    if n_centroids <= 0 or n_destinations <= 0 or n_vans <= 0:
        raise InvalidParams("centroid, destination and van counts must be positive")
    r1, _, r3, r4 = radii
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0, GENERATOR_STREAM]))

    dx, dy = _annulus(rng, 0.0, r1, 1)
    cx, cy = _annulus(rng, r1, r3, n_centroids)
    home = np.arange(n_destinations) % n_centroids
    cang = np.arctan2(cy, cx)
    angles = cang[home] + rng.normal(0.0, cluster_spread, n_destinations)
    ex, ey = _annulus(rng, r3, r4, n_destinations, angles=angles)

    points = np.column_stack([np.concatenate([dx, cx, ex]), np.concatenate([dy, cy, ey])])
    points = np.round(points, 6)
    n = len(points)
    undirected = [
        (u, v, round(minutes_per_km * math.dist(points[u], points[v]), 6)) for u, v in _planar_edges(points)
    ]
    graph = RoadGraph.from_undirected(n, undirected, [tuple(p) for p in points.tolist()], minutes_per_km)
    centroids = tuple(Centroid(j, 1 + j, f"C{j}") for j in range(n_centroids))
    template = van_template or VanAgent(0, capacity=40, shift_minutes=480.0, fixed_cost=50.0, variable_cost=0.5)
    vans = tuple(template.clone(k) for k in range(n_vans))
    dest_nodes = range(1 + n_centroids, n)
    demand = DemandModel(
        mean_daily_packages=mean_daily_packages,
        destination_weights=tuple((d, 1.0) for d in dest_nodes),
        pickup_probability=0.10,
        seed=seed,
    )
    return ScenarioSpec(
        graph=graph,
        dc=DistributionCenter(0),
        centroids=centroids,
        vans=vans,
        demand=demand,
        horizon_days=horizon_days,
        sim=SimConfig(anomaly=AnomalyPolicy(max_vans=max(10, 2 * n_vans))),
    )


def sample_daily_demand(model: DemandModel, day: int, first_id: int = 0) -> list[Package]:
    """New packages for ``day`` (at the DC), ids counting up from ``first_id``.

    Poisson count, weighted destinations, Bernoulli pickup intent.
    """
    if day < 1:
        raise ValueError("days are numbered from 1")
    rng = day_rng(model.seed, day, DEMAND_STREAM)
    if model.daily_counts is not None and day <= len(model.daily_counts):
        count = model.daily_counts[day - 1]
    elif model.mean_daily_packages <= 0:
        count = 0
    else:
        count = int(rng.poisson(model.mean_daily_packages))
    if count == 0:
        return []
    nodes = np.array([n for n, _ in model.destination_weights])
    weights = np.array([w for _, w in model.destination_weights], dtype=float)
    if len(nodes) == 0 or weights.sum() <= 0:
        raise ValueError("destination weights must have positive total")
    dests = rng.choice(nodes, size=count, p=weights / weights.sum())
    intents = rng.random(count) < model.pickup_probability
    return [
        Package(first_id + k, int(dests[k]), day, bool(intents[k])) for k in range(count)
    ]
