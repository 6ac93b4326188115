"""Road graph, Dijkstra shortest paths and the distance tables built on them.

Edge weights are travel times in minutes. Kilometre lengths are derived per
edge: the Euclidean length between node positions when positions exist,
otherwise ``weight / minutes_per_km``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidNode, NoPath

INF = math.inf

Edge = tuple[int, int, float]


@dataclass(frozen=True)
class RoadGraph:
    node_count: int
    edges: tuple[Edge, ...]
    positions: tuple[tuple[float, float], ...] | None = None
    minutes_per_km: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v), float(w)) for u, v, w in self.edges))
        if self.positions is not None:
            object.__setattr__(
                self, "positions", tuple((float(x), float(y)) for x, y in self.positions)
            )

    @classmethod
    def from_undirected(
        cls,
        node_count: int,
        edges: Iterable[Edge],
        positions: Sequence[tuple[float, float]] | None = None,
        minutes_per_km: float = 2.0,
    ) -> "RoadGraph":
        directed = []
        for u, v, w in edges:
            directed.append((u, v, w))
            directed.append((v, u, w))
        return cls(node_count, tuple(directed), None if positions is None else tuple(positions), minutes_per_km)

    @cached_property
    def adjacency(self) -> list[list[tuple[int, float, float]]]:
        """Outgoing ``(target, minutes, km)`` lists, in edge order."""
        adj: list[list[tuple[int, float, float]]] = [[] for _ in range(self.node_count)]
        for u, v, w in self.edges:
            adj[u].append((v, w, self.edge_km(u, v, w)))
        return adj

    def edge_km(self, u: int, v: int, weight: float) -> float:
        if self.positions is not None:
            (x0, y0), (x1, y1) = self.positions[u], self.positions[v]
            return math.hypot(x1 - x0, y1 - y0)
        return weight / self.minutes_per_km

    def euclidean_km(self, u: int, v: int) -> float:
        if self.positions is None:
            raise ValueError("graph has no node positions")
        (x0, y0), (x1, y1) = self.positions[u], self.positions[v]
        return math.hypot(x1 - x0, y1 - y0)

    def check_node(self, node: int) -> None:
        if not 0 <= node < self.node_count:
            raise InvalidNode(node, self.node_count)

    def path_km(self, path: "Path") -> float:
        """Kilometres along ``path``, using the first lightest edge of each hop."""
        total = 0.0
        for u, v in zip(path.nodes, path.nodes[1:]):
            hops = [(w, km) for t, w, km in self.adjacency[u] if t == v]
            total += min(hops, key=lambda h: h[0])[1]
        return total


@dataclass(frozen=True)
class Path:
    nodes: tuple[int, ...]
    cost: float


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    edge: Edge | None = None
    node: int | None = None


def validate_graph(graph: RoadGraph) -> list[Violation]:
    """List every broken invariant of ``graph``; empty when it is well formed."""
    out: list[Violation] = []
    n = graph.node_count
    if n < 0:
        out.append(Violation("NegativeNodeCount", f"node_count={n}"))
    for idx, (u, v, w) in enumerate(graph.edges):
        e = (u, v, w)
        if not (0 <= u < n and 0 <= v < n):
            out.append(Violation("DanglingEndpoint", f"edge {idx} {e} has endpoint outside 0..{n - 1}", edge=e))
        if u == v:
            out.append(Violation("SelfLoop", f"edge {idx} {e} is a self-loop", edge=e))
        if math.isnan(w) or math.isinf(w):
            out.append(Violation("NonFiniteWeight", f"edge {idx} {e} has non-finite weight", edge=e))
        elif w < 0:
            out.append(Violation("NegativeWeight", f"edge {idx} {e} has negative weight", edge=e))
    if graph.positions is not None and len(graph.positions) != n:
        out.append(
            Violation("PositionCount", f"{len(graph.positions)} positions for {n} nodes")
        )
    return out


def _dijkstra(graph: RoadGraph, src: int, dst: int | None = None):
    """Single-source search from ``src``.

    Frontier nodes are settled in order of tentative travel time, lowest node
    id first among equals. Relaxation only replaces a predecessor on strict
    improvement, so predecessor trees are reproducible. Stops early once
    ``dst`` is settled.
    """
    n = graph.node_count
    dist = [INF] * n
    km = [INF] * n
    pred = [-1] * n
    settled = [False] * n
    dist[src] = 0.0
    km[src] = 0.0
    frontier = [(0.0, src)]
    adj = graph.adjacency
    while frontier:
        d, v = heapq.heappop(frontier)
        if settled[v]:
            continue
        settled[v] = True
        if v == dst:
            break
        for t, w, length in adj[v]:
            nd = d + w
            if nd < dist[t]:
                dist[t] = nd
                km[t] = km[v] + length
                pred[t] = v
                heapq.heappush(frontier, (nd, t))
    return dist, km, pred


def shortest_path(graph: RoadGraph, src: int, dst: int) -> Path:
    graph.check_node(src)
    graph.check_node(dst)
    dist, _, pred = _dijkstra(graph, src, dst)
    if dist[dst] == INF:
        raise NoPath(src, dst)
    nodes = [dst]
    while nodes[-1] != src:
        nodes.append(pred[nodes[-1]])
    nodes.reverse()
    return Path(tuple(nodes), dist[dst])


@dataclass(frozen=True)
class DistanceTable:
    """Shortest travel times between a set of nodes, plus km along those paths.

    ``minutes[i][j]`` and ``km[i][j]`` index by position in ``nodes``;
    unreachable pairs hold ``inf``.
    """

    nodes: tuple[int, ...]
    minutes: np.ndarray
    km: np.ndarray
    index: dict[int, int] = field(compare=False, repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index.update({node: i for i, node in enumerate(self.nodes)})

    @cached_property
    def _minute_rows(self) -> list[list[float]]:
        return self.minutes.tolist()

    @cached_property
    def _km_rows(self) -> list[list[float]]:
        return self.km.tolist()

    def time(self, a: int, b: int) -> float:
        return self._minute_rows[self.index[a]][self.index[b]]

    def dist_km(self, a: int, b: int) -> float:
        return self._km_rows[self.index[a]][self.index[b]]

    def covers(self, nodes: Iterable[int]) -> bool:
        return all(n in self.index for n in nodes)

    def submatrix(self, nodes: Sequence[int], kind: str = "minutes") -> list[list[float]]:
        idx = [self.index[n] for n in nodes]
        rows = self._minute_rows if kind == "minutes" else self._km_rows
        return [[rows[i][j] for j in idx] for i in idx]


def all_pairs_distances(graph: RoadGraph, nodes: Iterable[int] | None = None) -> DistanceTable:
    node_list = sorted(set(range(graph.node_count) if nodes is None else nodes))
    for node in node_list:
        graph.check_node(node)
    k = len(node_list)
    minutes = np.full((k, k), INF)
    km = np.full((k, k), INF)
    for i, src in enumerate(node_list):
        dist, length, _ = _dijkstra(graph, src)
        minutes[i] = [dist[t] for t in node_list]
        km[i] = [length[t] for t in node_list]
    return DistanceTable(tuple(node_list), minutes, km)
