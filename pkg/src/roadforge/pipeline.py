"""End-to-end composition: curvature, segmentation, fitting."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .config import PipelineConfig
from .core import PrimitiveRun, RoadForgeError, RoadPolyline, chord_lengths, cumulative_arc_length
from .curvature import CurvatureProfile, estimate_curvature
from .fitting import RoadModel, build_model
from .segmentation import segment

log = logging.getLogger(__name__)


class PipelineError(RoadForgeError):
    def __init__(self, stage: str, source: str, cause: Exception):
        super().__init__(f"{source or '<polyline>'}: {stage} stage failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(eq=False)
class StageArtifacts:
    curvature: CurvatureProfile
    labels: np.ndarray
    runs: list[PrimitiveRun]


def _flat_profile(pts: np.ndarray) -> CurvatureProfile:
    # Too few points for any window: treat the whole polyline as straight.
    d = np.diff(pts, axis=0)
    t = d / chord_lengths(pts)[:, None]
    tangent = np.vstack([t, t[-1:]])
    normal = np.column_stack([-tangent[:, 1], tangent[:, 0]])
    return CurvatureProfile(cumulative_arc_length(pts), np.zeros(len(pts)), tangent, normal, "none", 0)


def _curvature(polyline: RoadPolyline, config: PipelineConfig) -> CurvatureProfile:
    n = len(polyline)
    q = min(config.q, (n - 1) // 2)
    if q < 2:
        log.warning("%s: only %d points, curvature skipped", polyline.source_id, n)
        return _flat_profile(polyline.points)
    if q < config.q:
        log.warning("%s: %d points, curvature half-window reduced to %d", polyline.source_id, n, q)
    return estimate_curvature(polyline, q, config.method)


def run_pipeline(polyline: RoadPolyline, config: PipelineConfig | None = None) -> tuple[RoadModel, StageArtifacts]:
    config = config or PipelineConfig()
    stage = "curvature"
    try:
        profile = _curvature(polyline, config)
        stage = "segmentation"
        labels, runs = segment(profile, config.vote_w, config.straight_delta)
        stage = "fitting"
        model = build_model(polyline, labels, runs, config)
    except RoadForgeError as exc:
        raise PipelineError(stage, polyline.source_id, exc) from exc
    return model, StageArtifacts(profile, labels, runs)


def summary(model: RoadModel, polyline: RoadPolyline) -> dict:
    return {
        "id": polyline.source_id,
        "n_points": len(polyline),
        "n_primitives": len(model.primitives),
        "max_error": model.max_error,
        "total_length": model.total_length,
    }
