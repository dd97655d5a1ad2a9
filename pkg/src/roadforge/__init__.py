"""Smooth, primitive-structured road models from raw GIS polylines."""

from .config import PipelineConfig
from .core import CurvatureSample, PrimitiveRun, RoadForgeError, RoadPolyline, cumulative_arc_length
from .curvature import estimate_curvature
from .fitting import FittedPrimitive, RoadModel, build_model, eval_model, offset_edges
from .io import export_model, ingest, load_model
from .pipeline import StageArtifacts, run_pipeline
from .segmentation import LEFT, RIGHT, STRAIGHT, segment

__all__ = [
    "CurvatureSample",
    "FittedPrimitive",
    "LEFT",
    "PipelineConfig",
    "PrimitiveRun",
    "RIGHT",
    "RoadForgeError",
    "RoadModel",
    "RoadPolyline",
    "STRAIGHT",
    "StageArtifacts",
    "build_model",
    "cumulative_arc_length",
    "estimate_curvature",
    "eval_model",
    "export_model",
    "ingest",
    "load_model",
    "offset_edges",
    "run_pipeline",
    "segment",
]
