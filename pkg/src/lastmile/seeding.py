"""Deterministic per-day random streams."""

from __future__ import annotations

import numpy as np

DEMAND_STREAM = 1
PICKUP_STREAM = 2
DELIVERY_STREAM = 3
BASELINE_DELIVERY_STREAM = 4
GENERATOR_STREAM = 9


def day_rng(seed: int, day: int, stream: int) -> np.random.Generator:
    """Independent generator for one (seed, day, concern) triple."""
    return np.random.default_rng(np.random.SeedSequence([seed, day, stream]))
