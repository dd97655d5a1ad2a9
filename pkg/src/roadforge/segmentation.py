"""Cut a road into straight, left-turn and right-turn runs from its curvature.

Labels follow the "ids" table convention: +1 for positive curvature (a right
turn when y points down, as on screen), -1 for negative curvature, 0 for
straight. The stages must run in the order of :func:`segment`.
"""

from __future__ import annotations

import numpy as np

from .core import PrimitiveRun

LEFT, STRAIGHT, RIGHT = -1, 0, 1

DEFAULT_VOTE_W = 7
DEFAULT_STRAIGHT_DELTA = 2e-3


def _kappa(samples) -> np.ndarray:
    if hasattr(samples, "kappa"):
        return np.asarray(samples.kappa, dtype=float)
    return np.asarray([getattr(c, "kappa", c) for c in samples], dtype=float)


def initial_marking(samples) -> np.ndarray:
    """+1 where curvature is positive or exactly zero, -1 where negative."""
    kappa = _kappa(samples)
    return np.where(kappa < 0, LEFT, RIGHT).astype(np.int8)


def vote_turns(ids, w: int = DEFAULT_VOTE_W) -> np.ndarray:
    """Relabel each point by the sign of the label sum over a w-window around it.

    Windows are truncated at the polyline ends; when a truncated window sums
    to zero the point keeps its current label.
    """
    if w < 3 or w % 2 == 0:
        raise ValueError(f"vote window must be odd and >= 3, got {w}")
    ids = np.asarray(ids, dtype=np.int64)
    n = len(ids)
    half = w // 2
    csum = np.concatenate([[0], np.cumsum(ids)])
    i = np.arange(n)
    lo = np.maximum(i - half, 0)
    hi = np.minimum(i + half + 1, n)
    total = csum[hi] - csum[lo]
    return np.where(total > 0, RIGHT, np.where(total < 0, LEFT, ids)).astype(np.int8)


def detect_straight(ids, samples, delta: float = DEFAULT_STRAIGHT_DELTA) -> np.ndarray:
    """Mark points with ``|kappa| < delta`` as straight."""
    if delta < 0:
        raise ValueError("straight threshold must be non-negative")
    out = np.array(ids, dtype=np.int8)
    out[np.abs(_kappa(samples)) < delta] = STRAIGHT
    return out


def _runs(ids: np.ndarray) -> list[tuple[int, int, int]]:
    """(label, start, length) of every maximal constant run."""
    if len(ids) == 0:
        return []
    cuts = np.flatnonzero(np.diff(ids)) + 1
    starts = np.concatenate([[0], cuts])
    stops = np.concatenate([cuts, [len(ids)]])
    return [(int(ids[a]), int(a), int(b - a)) for a, b in zip(starts, stops)]


def eliminate_isolated_straight(ids, samples) -> np.ndarray:
    """A straight run needs at least two points: single straight points fall
    back to the sign of their own curvature."""
    out = np.array(ids, dtype=np.int8)
    kappa = _kappa(samples)
    for label, start, length in _runs(out):
        if label == STRAIGHT and length == 1:
            out[start] = RIGHT if kappa[start] > 0 else LEFT
    return out


def assign_primitives(ids) -> list[PrimitiveRun]:
    ids = np.asarray(ids)
    if len(ids) == 0:
        raise ValueError("cannot assign primitives to an empty label array")
    return [PrimitiveRun(label, start, length) for label, start, length in _runs(ids)]


def segment(
    samples,
    vote_w: int = DEFAULT_VOTE_W,
    straight_delta: float = DEFAULT_STRAIGHT_DELTA,
) -> tuple[np.ndarray, list[PrimitiveRun]]:
    """Full labelling: marking, turn voting, straight detection, isolated-point repair."""
    ids = initial_marking(samples)
    ids = vote_turns(ids, vote_w)
    ids = detect_straight(ids, samples, straight_delta)
    ids = eliminate_isolated_straight(ids, samples)
    return ids, assign_primitives(ids)
