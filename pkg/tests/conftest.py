import math
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lastmile.graph import RoadGraph, all_pairs_distances  # noqa: E402
from lastmile.model import Centroid, VanAgent  # noqa: E402
from lastmile.network import generate_scenario  # noqa: E402


def euclid_graph(points, minutes_per_km=2.0):
    """Complete undirected graph over ``points`` with travel time proportional to distance."""
    n = len(points)
    edges = [
        (i, j, minutes_per_km * math.dist(points[i], points[j])) for i in range(n) for j in range(i + 1, n)
    ]
    return RoadGraph.from_undirected(n, edges, points, minutes_per_km)


def random_points(seed, n, size=10.0):
    rng = random.Random(seed)
    return [(rng.uniform(0, size), rng.uniform(0, size)) for _ in range(n)]


@pytest.fixture
def van():
    return VanAgent(0, capacity=30, shift_minutes=480.0, fixed_cost=10.0, variable_cost=2.0, service_time_per_stop=2.0)


@pytest.fixture
def line_graph():
    """Nodes 0..6 on the x axis, 1 km apart, neighbours joined."""
    pts = [(float(i), 0.0) for i in range(7)]
    edges = [(i, i + 1, 2.0) for i in range(6)]
    g = RoadGraph.from_undirected(7, edges, pts)
    return g, all_pairs_distances(g)


@pytest.fixture(scope="session")
def small_scenario():
    return generate_scenario([1, 3, 5, 8], 4, 60, 2, seed=11)


def centroids_at(nodes):
    return [Centroid(i, n, f"C{i}") for i, n in enumerate(nodes)]


ACCEPTANCE_LINES: list[str] = []


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
