"""Scenario-level value types shared by the planning and simulation modules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .graph import RoadGraph


@dataclass(frozen=True)
class Centroid:
    id: int
    node: int
    label: str = ""


@dataclass(frozen=True)
class DistributionCenter:
    node: int


@dataclass(frozen=True)
class VanAgent:
    id: int
    capacity: int
    shift_minutes: float
    fixed_cost: float
    variable_cost: float  # currency per km
    service_time_per_stop: float = 2.0

    def clone(self, new_id: int) -> "VanAgent":
        return VanAgent(
            new_id,
            self.capacity,
            self.shift_minutes,
            self.fixed_cost,
            self.variable_cost,
            self.service_time_per_stop,
        )


@dataclass(frozen=True)
class DemandModel:
    """Daily arrival process.

    ``destination_weights`` maps node -> relative weight. ``daily_counts``, when
    given, scripts the arrival count of day ``d`` as ``daily_counts[d - 1]``
    (days past the end fall back to Poisson draws).
    """

    mean_daily_packages: float
    destination_weights: tuple[tuple[int, float], ...]
    pickup_probability: float = 0.10
    seed: int = 0
    daily_counts: tuple[int, ...] | None = None

    def __post_init__(self):
        weights = self.destination_weights
        if isinstance(weights, dict):
            weights = weights.items()
        object.__setattr__(
            self, "destination_weights", tuple(sorted((int(n), float(w)) for n, w in weights))
        )
        if self.daily_counts is not None:
            object.__setattr__(self, "daily_counts", tuple(int(c) for c in self.daily_counts))


@dataclass(frozen=True)
class AnomalyPolicy:
    surge_factor: float = 1.5
    window_days: int = 5
    sustained_factor: float = 1.2
    max_vans: int = 10


@dataclass(frozen=True)
class SimConfig:
    lambda_terminal: float = 1.0
    success_probability: float = 0.95
    emission_g_per_km: float = 180.0
    anomaly: AnomalyPolicy = field(default_factory=AnomalyPolicy)
    centroid_capacity: float = math.inf
    early_service: bool = True


@dataclass(frozen=True)
class ScenarioSpec:
    graph: RoadGraph
    dc: DistributionCenter
    centroids: tuple[Centroid, ...]
    vans: tuple[VanAgent, ...]
    demand: DemandModel
    horizon_days: int = 30
    sim: SimConfig = field(default_factory=SimConfig)

    def __post_init__(self):
        object.__setattr__(self, "centroids", tuple(self.centroids))
        object.__setattr__(self, "vans", tuple(self.vans))
