"""Centroid-staged last-mile delivery routing and multi-day simulation."""

__version__ = "0.1.0"
