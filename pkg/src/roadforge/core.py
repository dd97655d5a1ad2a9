"""Domain types and arc-length helpers shared by every pipeline stage."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

# Consecutive points closer than this are considered duplicates.
DUPLICATE_TOL = 1e-9


class RoadForgeError(Exception):
    """Base class for pipeline errors."""


class DegenerateWindowError(RoadForgeError):
    pass


class TooFewPointsError(RoadForgeError):
    pass


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) array of points, got shape {pts.shape}")
    return pts


def dedupe_points(points) -> tuple[np.ndarray, int]:
    """Drop consecutive duplicates; return the cleaned points and how many were dropped."""
    pts = _as_points(points)
    if len(pts) == 0:
        return pts, 0
    keep = [0]
    for i in range(1, len(pts)):
        if np.hypot(*(pts[i] - pts[keep[-1]])) > DUPLICATE_TOL:
            keep.append(i)
    return pts[keep], len(pts) - len(keep)


@dataclass(frozen=True, eq=False)
class RoadPolyline:
    """Ordered planar road centerline in local metric coordinates."""

    points: np.ndarray
    source_id: str = ""

    def __post_init__(self):
        pts = _as_points(self.points).copy()
        if len(pts) < 2:
            raise ValueError("a road polyline needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("polyline coordinates must be finite")
        gaps = np.hypot(*np.diff(pts, axis=0).T)
        if np.any(gaps <= DUPLICATE_TOL):
            i = int(np.argmax(gaps <= DUPLICATE_TOL))
            raise ValueError(f"duplicate consecutive points at index {i} of {self.source_id!r}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_raw(cls, points, source_id: str = "") -> RoadPolyline:
        """Build from raw GIS points, dropping consecutive duplicates with a warning."""
        pts, dropped = dedupe_points(points)
        if dropped:
            log.warning("%s: dropped %d duplicate consecutive point(s)", source_id or "<polyline>", dropped)
        return cls(pts, source_id)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def length(self) -> float:
        return float(np.sum(chord_lengths(self.points)))


@dataclass(frozen=True, eq=False)
class CurvatureSample:
    index: int
    s: float
    kappa: float
    tangent: np.ndarray
    normal: np.ndarray


@dataclass(eq=False)
class PrimitiveRun:
    """One "gpts" record: a maximal run of equally labelled points.

    ``param_x``/``param_y`` hold cubic coefficients (constant term first)
    once the run has been fitted.
    """

    type: int
    id: int
    nbr: int
    param_x: np.ndarray = field(default_factory=lambda: np.zeros(4))
    param_y: np.ndarray = field(default_factory=lambda: np.zeros(4))

    @property
    def stop(self) -> int:
        return self.id + self.nbr

    def __eq__(self, other) -> bool:
        if not isinstance(other, PrimitiveRun):
            return NotImplemented
        return (
            (self.type, self.id, self.nbr) == (other.type, other.id, other.nbr)
            and np.array_equal(self.param_x, other.param_x)
            and np.array_equal(self.param_y, other.param_y)
        )

    def __repr__(self) -> str:
        return f"PrimitiveRun(type={self.type:+d}, id={self.id}, nbr={self.nbr})"


def chord_lengths(points) -> np.ndarray:
    pts = _as_points(points)
    return np.hypot(*np.diff(pts, axis=0).T)


def cumulative_arc_length(polyline: RoadPolyline | np.ndarray, origin: int = 0) -> np.ndarray:
    """Signed chord-length arc length of every point, measured from ``origin``.

    Points before the origin get negative values.
    """
    pts = polyline.points if isinstance(polyline, RoadPolyline) else _as_points(polyline)
    n = len(pts)
    if not -n <= origin < n:
        raise IndexError(f"origin {origin} out of range for {n} points")
    origin %= n
    l = np.concatenate([[0.0], np.cumsum(chord_lengths(pts))])
    return l - l[origin]
