import json
import math

import numpy as np
import pytest

from roadforge.core import RoadForgeError, RoadPolyline
from roadforge.fitting import max_deviation, local_arc_params
from roadforge.io import (
    ParseError,
    dumps_model,
    export_model,
    ingest,
    load_model,
    project_local_tangent_plane,
)
from roadforge.pipeline import run_pipeline
from roads import s_road


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def _line(coords, **props):
    return {"type": "Feature", "properties": props, "geometry": {"type": "LineString", "coordinates": coords}}


# -- CSV ---------------------------------------------------------------------


def test_csv_basic(tmp_path):
    [poly] = ingest(_write(tmp_path, "road.csv", "0,0\n10,0\n20,0\n"))
    assert len(poly) == 3 and poly.length == pytest.approx(20.0)
    assert poly.source_id == "road"


def test_csv_header_comments_and_duplicates(tmp_path, caplog):
    text = "x,y\n# exported\n0,0\n0,0\n\n5,5,extra\n5,5\n9,9\n"
    [poly] = ingest(_write(tmp_path, "r.csv", text))
    assert poly.points.tolist() == [[0, 0], [5, 5], [9, 9]]
    assert "dropped 2 duplicate" in caplog.text


def test_csv_malformed_reports_line(tmp_path):
    with pytest.raises(ParseError, match=r"bad\.csv:3"):
        ingest(_write(tmp_path, "bad.csv", "0,0\n1,1\nfoo,2\n"))


def test_csv_too_short_is_skipped(tmp_path, caplog):
    assert ingest(_write(tmp_path, "one.csv", "1,1\n1,1\n")) == []
    assert "skipped" in caplog.text


def test_csv_lonlat_projection(tmp_path):
    [poly] = ingest(_write(tmp_path, "ll.csv", "0,0\n0.001,0\n"), format="csv-lonlat")
    # equirectangular oracle: R * dlon (radians) * cos(lat)
    assert poly.length == pytest.approx(6371000.0 * math.radians(0.001), rel=1e-12)
    assert poly.length == pytest.approx(111.195, abs=1e-3)


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        ingest(tmp_path / "nope.csv")


# -- GeoJSON -----------------------------------------------------------------


def test_geojson_feature_collection_order(tmp_path):
    doc = {
        "type": "FeatureCollection",
        "features": [
            _line([[0, 0], [10, 0]], name="first"),
            {"type": "Feature", "properties": {}, "geometry": {"type": "Point", "coordinates": [1, 1]}},
            _line([[0, 5], [0, 15], [2, 30]], name="second"),
        ],
    }
    polys = ingest(_write(tmp_path, "r.geojson", json.dumps(doc)))
    assert [p.source_id for p in polys] == ["first", "second"]
    assert [len(p) for p in polys] == [2, 3]


def test_geojson_multilinestring_and_bare_geometry(tmp_path):
    geom = {"type": "MultiLineString", "coordinates": [[[0, 0], [1, 0]], [[5, 5], [6, 6], [7, 7, 99]]]}
    polys = ingest(_write(tmp_path, "m.json", json.dumps(geom)))
    assert [p.source_id for p in polys] == ["m:0/0", "m:0/1"]
    assert polys[1].points[-1].tolist() == [7, 7]


def test_geojson_lonlat_projection(tmp_path):
    doc = _line([[3.0, 36.7], [3.001, 36.7], [3.002, 36.701]])
    [poly] = ingest(_write(tmp_path, "a.geojson", json.dumps(doc)), projection="local-tangent-plane")
    assert np.all(np.abs(poly.points) < 200)
    d = np.hypot(*np.diff(poly.points, axis=0).T)
    lat0 = (36.7 + 36.7 + 36.701) / 3
    assert d[0] == pytest.approx(6371000 * math.radians(3.001 - 3.0) * math.cos(math.radians(lat0)), rel=1e-9)


@pytest.mark.parametrize(
    "text, match",
    [
        ("{not json", "invalid JSON at line 1"),
        ('{"type": "Topology"}', "unsupported"),
        ('{"type": "FeatureCollection"}', "features"),
        (json.dumps(_line([[0, 0], ["a", 1]])), "bad position #1"),
        (json.dumps(_line("oops")), "must be an array"),
    ],
)
def test_geojson_malformed(tmp_path, text, match):
    with pytest.raises(ParseError, match=match):
        ingest(_write(tmp_path, "bad.geojson", text))


def test_projection_refuses_wide_extent():
    with pytest.raises(ParseError, match="1 degree"):
        project_local_tangent_plane([[0, 0], [1.5, 0]])


def test_unknown_format(tmp_path):
    with pytest.raises(ParseError):
        ingest(_write(tmp_path, "r.csv", "0,0\n1,1\n"), format="shp")


# -- model JSON --------------------------------------------------------------


@pytest.fixture
def s_model():
    pts, _, _ = s_road()
    poly = RoadPolyline(pts, "s-road")
    return run_pipeline(poly)[0], poly


def test_export_schema(tmp_path, s_model):
    model, _ = s_model
    path = export_model(model, tmp_path / "m.json")
    doc = json.loads(path.read_text())
    assert doc["total_length"] == pytest.approx(model.total_length)
    assert doc["config"]["error_bound"] == 2.0
    prim = doc["primitives"][0]
    assert set(prim) == {"type", "id", "nbr", "paramX", "paramY", "length", "max_error"}
    assert len(prim["paramX"]) == len(prim["paramY"]) == 4


def test_export_single_chord(tmp_path):
    t = np.arange(0, 100.0, 10)
    poly = RoadPolyline(np.column_stack([t, 2 * t]), "line")
    model, _ = run_pipeline(poly)
    doc = json.loads(export_model(model, tmp_path / "c.json").read_text())
    [prim] = doc["primitives"]
    assert prim["paramX"][2:] == [0, 0] and prim["paramY"][2:] == [0, 0]


def test_round_trip_bytes(tmp_path, s_model):
    model, _ = s_model
    first = export_model(model, tmp_path / "a.json").read_bytes()
    again = export_model(load_model(tmp_path / "a.json"), tmp_path / "b.json").read_bytes()
    assert first == again
    loaded = load_model(tmp_path / "a.json")
    for p, q in zip(model.primitives, loaded.primitives):
        assert p.a.tobytes() == q.a.tobytes() and p.b.tobytes() == q.b.tobytes()
        assert p.length == q.length and p.max_error == q.max_error


def test_numbers_use_17_significant_digits(s_model):
    model, _ = s_model
    text = dumps_model(model)
    coef = repr(float(model.primitives[0].a[1]))
    assert format(float(model.primitives[0].a[1]), ".17g") in text
    assert float(format(float(coef), ".17g")) == float(coef)


def test_exported_max_error_matches_recomputation(tmp_path, s_model):
    model, poly = s_model
    doc = json.loads(export_model(model, tmp_path / "m.json").read_text())
    for prim in doc["primitives"]:
        sub = poly.points[prim["id"] : prim["id"] + prim["nbr"]]
        s = local_arc_params(sub)
        recomputed = max_deviation((prim["paramX"], prim["paramY"]), sub, s)
        assert prim["max_error"] == pytest.approx(recomputed, abs=1e-9)


def test_load_rejects_foreign_json(tmp_path):
    with pytest.raises(ParseError):
        load_model(_write(tmp_path, "x.json", '{"format": "other"}'))
    with pytest.raises(ParseError):
        load_model(_write(tmp_path, "y.json", "[1, 2"))


def test_export_io_failure(tmp_path, s_model):
    model, _ = s_model
    with pytest.raises(RoadForgeError, match="cannot write"):
        export_model(model, tmp_path / "missing" / "m.json")
