"""Package lifecycle: staging, the two-day pickup window, third-day delivery and rollover."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .seeding import PICKUP_STREAM, day_rng

PICKUP_WINDOW_DAYS = 2
DUE_RESIDENCE = 2


class Stage(enum.Enum):
    AT_DC = "AtDC"
    AT_CENTROID = "AtCentroid"
    OUT_FOR_DELIVERY = "OutForDelivery"
    DELIVERED = "Delivered"
    PICKED_UP = "PickedUp"
    ROLLED_OVER = "RolledOver"


TERMINAL = frozenset({Stage.DELIVERED, Stage.PICKED_UP})


class Orientation(enum.Enum):
    FORWARD = "forward"
    REVERSED = "reversed"


class IllegalTransition(RuntimeError):
    pass


@dataclass
class Package:
    id: int
    dest: int
    arrival_day: int
    pickup_intent: bool
    home_centroid: int | None = None
    stage: Stage = Stage.AT_DC
    location: int | None = None  # centroid physically holding the package
    residence_days: int = 0
    staged_day: int | None = None
    van: int | None = None
    closed_day: int | None = None
    rolled_from: int | None = None
    due_override: int | None = None
    promoted_day: int | None = None
    early: bool = False  # served before its third day on purpose
    first_attempt_day: int | None = None
    attempts: int = 0
    failures: int = 0

    @property
    def terminal(self) -> bool:
        return self.stage in TERMINAL

    def _require(self, *stages: Stage) -> None:
        if self.stage not in stages:
            raise IllegalTransition(f"package {self.id} is {self.stage.value}, expected {[s.value for s in stages]}")

    def stage_at(self, centroid: int, day: int) -> None:
        self._require(Stage.AT_DC)
        self.home_centroid = centroid
        self.location = centroid
        self.stage = Stage.AT_CENTROID
        self.residence_days = 0
        self.staged_day = day

    def pick_up(self, day: int) -> None:
        self._require(Stage.AT_CENTROID)
        self.stage = Stage.PICKED_UP
        self.closed_day = day
        self.location = None

    def load(self, van: int, day: int) -> None:
        self._require(Stage.AT_CENTROID, Stage.ROLLED_OVER, Stage.AT_DC)
        self.stage = Stage.OUT_FOR_DELIVERY
        self.van = van
        self.attempts += 1
        if self.first_attempt_day is None:
            self.first_attempt_day = day


@dataclass(frozen=True)
class DeliveryOutcome:
    package_id: int
    success: bool
    day: int
    reason: str = ""
    unloaded_at: int | None = None


def _in_order(packages: Iterable[Package]) -> list[Package]:
    return sorted(packages, key=lambda p: p.id)


def age_packages(packages: Iterable[Package], day: int) -> list[Package]:
    """Advance the residence clock of staged packages; return those entering their third day.

    Packages staged today keep residence 0. The clock saturates at 2.
    """
    due = []
    for p in _in_order(packages):
        if p.stage is not Stage.AT_CENTROID or p.staged_day is None or p.staged_day >= day:
            continue
        if p.residence_days < DUE_RESIDENCE:
            p.residence_days += 1
        if p.residence_days == DUE_RESIDENCE:
            due.append(p)
    return due


def window_day(p: Package, day: int) -> int:
    """1-based day of the current stay at the centroid."""
    return day - p.staged_day + 1


def sample_pickups(packages: Iterable[Package], day: int, rng: np.random.Generator | int) -> list[Package]:
    """Self-pickups for ``day``.

    A package with pickup intent is collected on the first or second day of
    its window with equal probability: on day one it is collected with
    probability 1/2, and any still waiting on day two are collected then.
    Surge-promoted and rolled-over packages are not eligible. ``rng`` may be
    an integer seed, in which case the day's pickup stream is used.
    """
    if not isinstance(rng, np.random.Generator):
        rng = day_rng(int(rng), day, PICKUP_STREAM)
    picked = []
    for p in _in_order(packages):
        if p.stage is not Stage.AT_CENTROID or not p.pickup_intent or p.promoted_day is not None:
            continue
        wd = window_day(p, day)
        if wd == 1:
            if rng.random() < 0.5:
                picked.append(p)
        elif wd == PICKUP_WINDOW_DAYS:
            picked.append(p)
    for p in picked:
        p.pick_up(day)
    return picked


def resolve_delivery_attempt(
    package: Package,
    success_probability: float,
    tour: Sequence[int],
    position: int,
    rng: np.random.Generator,
    day: int,
) -> DeliveryOutcome:
    """Settle one attempt for a package the van is carrying.

    ``tour`` is the van's centroid-id sequence and ``position`` the index of
    the centroid whose neighbourhood route made the attempt. A failed package
    is unloaded at the following centroid, or stays at the current one when
    it is the last of the day.
    """
    package._require(Stage.OUT_FOR_DELIVERY)
    if rng.random() < success_probability:
        package.stage = Stage.DELIVERED
        package.closed_day = day
        package.location = None
        package.due_override = None
        return DeliveryOutcome(package.id, True, day)
    current = tour[position]
    target = tour[position + 1] if position + 1 < len(tour) else current
    package.stage = Stage.ROLLED_OVER
    package.rolled_from = current
    package.location = target
    package.residence_days = 0
    package.staged_day = day
    package.failures += 1
    return DeliveryOutcome(package.id, False, day, "recipient unavailable", target)


def reschedule_failed(rolled: Iterable[Package], day: int) -> set[int]:
    """Mark rolled-over packages due on the following day."""
    overrides = set()
    for p in _in_order(rolled):
        p._require(Stage.ROLLED_OVER)
        p.due_override = day + 1
        overrides.add(p.id)
    return overrides


def reverse_orientation(previous: Orientation) -> Orientation:
    return Orientation.REVERSED if previous is Orientation.FORWARD else Orientation.FORWARD


def stage_counts(packages: Iterable[Package]) -> dict[str, int]:
    """Counts per conservation bucket; rolled-over packages sit at a centroid."""
    counts = {"AtDC": 0, "AtCentroid": 0, "OutForDelivery": 0, "Delivered": 0, "PickedUp": 0}
    for p in packages:
        key = Stage.AT_CENTROID.value if p.stage is Stage.ROLLED_OVER else p.stage.value
        counts[key] += 1
    return counts
