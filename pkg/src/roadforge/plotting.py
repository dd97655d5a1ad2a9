"""SVG rendering of the pipeline stages for visual inspection."""

from __future__ import annotations

import warnings
from pathlib import Path
from xml.etree import ElementTree as ET

import numpy as np

from .core import RoadForgeError, RoadPolyline
from .fitting import RoadModel, eval_model, offset_edges, sample_arc
from .pipeline import StageArtifacts
from .segmentation import LEFT, RIGHT, STRAIGHT

RAW = "#d62728"
CENTERLINE = "#1f4fd6"
EDGES = "#d62ad6"
NORMALS = "#555555"
LABEL_COLORS = {LEFT: "#ff8c00", STRAIGHT: "#2ca02c", RIGHT: "#8c564b"}


def _f(v: float) -> str:
    text = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if text in ("", "-0") else text


def _svg_xy(pts: np.ndarray) -> np.ndarray:
    # SVG y grows downwards.
    return np.column_stack([pts[:, 0], -pts[:, 1]])


def _points_attr(pts: np.ndarray) -> str:
    return " ".join(f"{_f(x)},{_f(y)}" for x, y in _svg_xy(pts))


def render_stages(
    polyline: RoadPolyline,
    artifacts: StageArtifacts,
    model: RoadModel,
    half_width: float = 3.5,
    step: float = 1.0,
) -> bytes:
    """One SVG with a layer per stage: raw points, curvature normals, labels,
    fitted centreline and road edges."""
    pts = polyline.points
    prof = artifacts.curvature
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        left, right = offset_edges(model, half_width, step)
    centre = eval_model(model, sample_arc(model, step))[0]

    lo = pts.min(axis=0) - half_width
    hi = pts.max(axis=0) + half_width
    diag = float(np.hypot(*(hi - lo)))
    kmax = float(np.max(np.abs(prof.kappa))) if len(prof) else 0.0
    normal_scale = 0.05 * diag / kmax if kmax > 0 else 0.0
    tips = pts + prof.normal * (np.abs(prof.kappa) * normal_scale)[:, None]
    allpts = np.vstack([pts, left, right, tips])
    lo = np.minimum(lo, allpts.min(axis=0))
    hi = np.maximum(hi, allpts.max(axis=0))
    width, height = hi - lo
    unit = max(width, height) / 800.0

    svg = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "viewBox": f"{_f(lo[0])} {_f(-hi[1])} {_f(width)} {_f(height)}",
            "width": "1000",
            "height": _f(1000 * height / width) if width > 0 else "1000",
        },
    )
    ET.SubElement(svg, "title").text = polyline.source_id or "road"

    g = ET.SubElement(svg, "g", {"id": "edges", "fill": "none", "stroke": EDGES, "stroke-width": _f(unit)})
    for name, edge in (("left", left), ("right", right)):
        ET.SubElement(g, "polyline", {"class": f"edge-{name}", "points": _points_attr(edge)})

    g = ET.SubElement(svg, "g", {"id": "centerline", "fill": "none", "stroke": CENTERLINE, "stroke-width": _f(1.5 * unit)})
    ET.SubElement(g, "polyline", {"points": _points_attr(centre)})

    g = ET.SubElement(svg, "g", {"id": "normals", "stroke": NORMALS, "stroke-width": _f(0.5 * unit)})
    for (x0, y0), (x1, y1) in zip(_svg_xy(pts), _svg_xy(tips)):
        ET.SubElement(g, "line", {"x1": _f(x0), "y1": _f(y0), "x2": _f(x1), "y2": _f(y1)})

    g = ET.SubElement(svg, "g", {"id": "labels"})
    for (x, y), label in zip(_svg_xy(pts), artifacts.labels):
        ET.SubElement(
            g, "circle", {"cx": _f(x), "cy": _f(y), "r": _f(2.5 * unit), "fill": LABEL_COLORS[int(label)]}
        )

    g = ET.SubElement(svg, "g", {"id": "raw", "fill": RAW})
    for x, y in _svg_xy(pts):
        ET.SubElement(g, "circle", {"cx": _f(x), "cy": _f(y), "r": _f(unit)})

    g = ET.SubElement(svg, "g", {"id": "junctions", "fill": CENTERLINE})
    for prim in model.primitives:
        x, y = _svg_xy(prim.point(np.array([0.0])))[0]
        ET.SubElement(g, "circle", {"cx": _f(x), "cy": _f(y), "r": _f(2 * unit)})

    return ET.tostring(svg, encoding="utf-8", xml_declaration=True) + b"\n"


def plot_stages(polyline, artifacts, model, path, half_width: float = 3.5, step: float = 1.0) -> Path:
    path = Path(path)
    data = render_stages(polyline, artifacts, model, half_width, step)
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise RoadForgeError(f"cannot write SVG to {path}: {exc.strerror or exc}") from None
    return path
