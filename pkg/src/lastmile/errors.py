"""Exception types shared across the package."""

from __future__ import annotations


class LastMileError(Exception):
    pass


class InvalidNode(LastMileError, ValueError):
    def __init__(self, node: int, node_count: int):
        super().__init__(f"node {node} outside 0..{node_count - 1}")
        self.node = node


class NoPath(LastMileError):
    def __init__(self, src: int, dst: int):
        super().__init__(f"no path from {src} to {dst}")
        self.src = src
        self.dst = dst


class Unreachable(LastMileError):
    """A stop, destination or target cannot be reached over the road graph."""


class TooLarge(LastMileError, ValueError):
    pass


class InvalidParams(LastMileError, ValueError):
    pass


class SchemaError(LastMileError):
    """Scenario file failed validation.

    ``violations`` holds ``(json_path, message)`` pairs.
    """

    def __init__(self, violations: list[tuple[str, str]]):
        self.violations = list(violations)
        lines = "; ".join(f"{p}: {m}" for p, m in self.violations)
        super().__init__(f"invalid scenario: {lines}")
