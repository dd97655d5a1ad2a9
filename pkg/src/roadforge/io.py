"""Reading GIS polylines and reading/writing fitted road models."""

from __future__ import annotations

import csv
import json
import logging
import math
from pathlib import Path

import numpy as np

from .core import RoadForgeError, RoadPolyline, dedupe_points
from .fitting import FittedPrimitive, RoadModel

log = logging.getLogger(__name__)

EARTH_RADIUS = 6371000.0
MAX_PROJECTION_SPAN_DEG = 1.0
FORMATS = ("geojson", "csv-xy", "csv-lonlat")
MODEL_FORMAT = "roadforge-model/1"


class ParseError(RoadForgeError):
    pass


def guess_format(path) -> str:
    return "geojson" if Path(path).suffix.lower() in (".geojson", ".json") else "csv-xy"


def project_local_tangent_plane(lonlat) -> np.ndarray:
    """Equirectangular projection to metres about the centroid of ``lonlat``."""
    ll = np.asarray(lonlat, dtype=float)
    span = np.ptp(ll, axis=0)
    if np.any(span > MAX_PROJECTION_SPAN_DEG):
        raise ParseError(f"polyline spans {span.max():.3f} degrees; local projection is limited to 1 degree")
    if np.any(np.abs(ll[:, 1]) > 90):
        raise ParseError("latitude outside [-90, 90]; is the input really lon/lat?")
    lon0, lat0 = ll.mean(axis=0)
    x = EARTH_RADIUS * np.radians(ll[:, 0] - lon0) * math.cos(math.radians(lat0))
    y = EARTH_RADIUS * np.radians(ll[:, 1] - lat0)
    return np.column_stack([x, y])


def _make_polyline(coords, source_id: str, lonlat: bool) -> RoadPolyline | None:
    pts = np.asarray(coords, dtype=float).reshape(-1, 2)
    if lonlat and len(pts):
        pts = project_local_tangent_plane(pts)
    pts, dropped = dedupe_points(pts)
    if dropped:
        log.warning("%s: dropped %d duplicate consecutive point(s)", source_id, dropped)
    if len(pts) < 2:
        log.warning("%s: fewer than 2 distinct points, skipped", source_id)
        return None
    return RoadPolyline(pts, source_id)


def _coords(raw, where: str) -> list[tuple[float, float]]:
    if not isinstance(raw, list):
        raise ParseError(f"{where}: coordinates must be an array")
    out = []
    for j, c in enumerate(raw):
        try:
            x, y = float(c[0]), float(c[1])
        except (TypeError, ValueError, IndexError, KeyError):
            raise ParseError(f"{where}: bad position #{j}: {c!r}") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ParseError(f"{where}: non-finite position #{j}")
        out.append((x, y))
    return out


def _feature_name(feature: dict, k: int, stem: str) -> str:
    props = feature.get("properties") or {}
    for key in ("id", "name"):
        value = feature.get(key) if key == "id" else None
        value = value if value is not None else props.get(key)
        if value is not None:
            return str(value)
    return f"{stem}:{k}"


def read_geojson(path, lonlat: bool = False) -> list[RoadPolyline]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be a GeoJSON object")
    kind = doc.get("type")
    if kind == "FeatureCollection":
        features = doc.get("features")
        if not isinstance(features, list):
            raise ParseError(f"{path}: FeatureCollection without a features array")
    elif kind == "Feature":
        features = [doc]
    elif kind in ("LineString", "MultiLineString"):
        features = [{"type": "Feature", "geometry": doc}]
    else:
        raise ParseError(f"{path}: unsupported GeoJSON type {kind!r}")

    out = []
    for k, feature in enumerate(features):
        if not isinstance(feature, dict):
            raise ParseError(f"{path}: feature #{k} is not an object")
        geom = feature.get("geometry") or {}
        name = _feature_name(feature, k, path.stem)
        where = f"{path}: feature #{k} ({name})"
        if geom.get("type") == "LineString":
            parts = [(name, geom.get("coordinates"))]
        elif geom.get("type") == "MultiLineString":
            lines = geom.get("coordinates")
            if not isinstance(lines, list):
                raise ParseError(f"{where}: coordinates must be an array")
            parts = [(f"{name}/{j}", line) for j, line in enumerate(lines)]
        else:
            log.warning("%s: geometry %r is not a line, skipped", where, geom.get("type"))
            continue
        for part_name, raw in parts:
            poly = _make_polyline(_coords(raw, where), part_name, lonlat)
            if poly is not None:
                out.append(poly)
    return out


def read_csv(path, lonlat: bool = False) -> list[RoadPolyline]:
    """One track per file: the first two numeric columns of every row.

    A non-numeric first row is taken as a header; blank and ``#`` lines are ignored.
    """
    path = Path(path)
    coords = []
    seen_row = False
    with path.open(newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            try:
                if len(row) < 2:
                    raise ValueError
                x, y = float(row[0]), float(row[1])
            except ValueError:
                if not seen_row:
                    seen_row = True
                    continue
                raise ParseError(f"{path}:{lineno}: expected two numbers, got {row!r}") from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ParseError(f"{path}:{lineno}: non-finite coordinate")
            seen_row = True
            coords.append((x, y))
    if not coords:
        log.warning("%s: no coordinates found", path)
        return []
    poly = _make_polyline(coords, path.stem, lonlat)
    return [poly] if poly is not None else []


def ingest(path, format: str | None = None, projection: str = "none") -> list[RoadPolyline]:
    """Read every road polyline in a GeoJSON or CSV file, in file order."""
    path = Path(path)
    format = format or guess_format(path)
    if format not in FORMATS:
        raise ParseError(f"unknown input format {format!r}; choose from {FORMATS}")
    lonlat = projection == "local-tangent-plane" or format == "csv-lonlat"
    try:
        if format == "geojson":
            return read_geojson(path, lonlat)
        return read_csv(path, lonlat)
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None


# -- model JSON --------------------------------------------------------------


def _num(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite number {x}")
    text = format(x, ".17g")
    return text if any(ch in text for ch in ".en") else text + ".0"


def _emit(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in items):
            return "[" + ", ".join(_emit(v) for v in items) + "]"
        inner = ",\n".join(pad + "  " + _emit(v, indent + 1) for v in items)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(f"{pad}  {json.dumps(str(k))}: {_emit(v, indent + 1)}" for k, v in obj.items())
        return "{\n" + inner + "\n" + pad + "}"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def model_to_dict(model: RoadModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "source": model.source,
        "road_width": float(model.road_width),
        "config": dict(model.params),
        "total_length": model.total_length,
        "primitives": [
            {
                "type": int(p.type),
                "id": int(p.id),
                "nbr": int(p.nbr),
                "paramX": [float(v) for v in p.a],
                "paramY": [float(v) for v in p.b],
                "length": float(p.length),
                "max_error": float(p.max_error),
            }
            for p in model.primitives
        ],
    }


def dumps_model(model: RoadModel) -> str:
    """Serialise with 17 significant digits so every float survives a round trip."""
    return _emit(model_to_dict(model)) + "\n"


def export_model(model: RoadModel, path) -> Path:
    path = Path(path)
    try:
        path.write_text(dumps_model(model), encoding="utf-8")
    except OSError as exc:
        raise RoadForgeError(f"cannot write model to {path}: {exc.strerror or exc}") from None
    return path


def model_from_dict(doc: dict) -> RoadModel:
    if doc.get("format") != MODEL_FORMAT:
        raise ParseError(f"not a road model document (format={doc.get('format')!r})")
    prims = [
        FittedPrimitive(
            type=int(p["type"]),
            id=int(p["id"]),
            nbr=int(p["nbr"]),
            a=np.asarray(p["paramX"], dtype=float),
            b=np.asarray(p["paramY"], dtype=float),
            length=float(p["length"]),
            max_error=float(p["max_error"]),
        )
        for p in doc["primitives"]
    ]
    return RoadModel(prims, float(doc["road_width"]), doc.get("source", ""), dict(doc.get("config", {})))


def load_model(path) -> RoadModel:
    path = Path(path)
    try:
        return model_from_dict(json.loads(path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(f"{path}: malformed model document: {exc}") from None
