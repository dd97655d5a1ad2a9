"""Arc-length cubic fitting of road primitives under a maximum-deviation bound.

Each primitive stores ``x(s) = a0 + a1 s + a2 s^2 + a3 s^3`` and the same for
y with coefficients ``b``, on a local domain ``0 <= s <= length``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import PrimitiveRun, RoadForgeError, RoadPolyline, chord_lengths
from .segmentation import STRAIGHT

DEFAULT_ERROR_BOUND = 2.0


class RankDeficiencyError(RoadForgeError):
    pass


class FitError(RoadForgeError):
    pass


class ModelDomainError(RoadForgeError, ValueError):
    pass


def local_arc_params(points) -> np.ndarray:
    """Cumulative chord length along a run, starting at 0."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        raise ValueError("need at least 2 points")
    return np.concatenate([[0.0], np.cumsum(chord_lengths(pts))])


def polyval(coef, s):
    """Evaluate a cubic with constant term first (Horner)."""
    c0, c1, c2, c3 = coef
    return c0 + s * (c1 + s * (c2 + s * c3))


def _derivatives(coef, s):
    _, c1, c2, c3 = coef
    return c1 + s * (2.0 * c2 + 3.0 * c3 * s), 2.0 * c2 + 6.0 * c3 * s


def _from_scaled(coef, scale: float) -> np.ndarray:
    return np.asarray(coef) / scale ** np.arange(len(coef))


def fit_cubic_unconstrained(points, s) -> tuple[np.ndarray, np.ndarray]:
    """Ordinary least-squares cubic for x(s) and y(s).

    Solved by an orthogonal factorisation of the Vandermonde matrix in the
    rescaled variable ``s / max|s|``, which keeps it well conditioned.
    """
    pts = np.asarray(points, dtype=float)
    s = np.asarray(s, dtype=float)
    if len(np.unique(s)) < 4:
        raise RankDeficiencyError("cubic regression needs at least 4 distinct arc-length values")
    scale = float(np.max(np.abs(s)))
    V = np.vander(s / scale, 4, increasing=True)
    coef, _, rank, sv = np.linalg.lstsq(V, pts, rcond=None)
    if rank < 4 or sv[-1] < 1e-12 * sv[0]:
        raise RankDeficiencyError("Vandermonde matrix is numerically rank deficient")
    return _from_scaled(coef[:, 0], scale), _from_scaled(coef[:, 1], scale)


def fit_cubic_endpoint_constrained(points, s) -> tuple[np.ndarray, np.ndarray]:
    """Cubic through the first and last points; the remaining freedom is
    spent on a least-squares fit of the interior points.

    The fit is the chord plus a combination of ``s(s-L)`` and ``s^2(s-L)``,
    both of which vanish at the ends. Three points give a parabola and two
    points the chord.
    """
    pts = np.asarray(points, dtype=float)
    s = np.asarray(s, dtype=float)
    if len(pts) < 2:
        raise ValueError("need at least 2 points")
    length = float(s[-1] - s[0])
    if not length > 0:
        raise FitError("run has zero arc length")
    t = (s - s[0]) / length
    p0, p1 = pts[0], pts[-1]
    # Coefficients in t on [0, 1], rescaled to s at the end.
    coef = np.zeros((4, 2))
    coef[0] = p0
    coef[1] = p1 - p0
    n_free = min(2, len(pts) - 2)
    if n_free:
        basis = np.stack([t * (t - 1.0), t * t * (t - 1.0)], axis=1)[:, :n_free]
        resid = pts - (p0 + np.outer(t, p1 - p0))
        c, *_ = np.linalg.lstsq(basis[1:-1], resid[1:-1], rcond=None)
        # t(t-1) = t^2 - t ; t^2(t-1) = t^3 - t^2
        coef[1] -= c[0]
        coef[2] += c[0]
        if n_free == 2:
            coef[2] -= c[1]
            coef[3] += c[1]
    a, b = _from_scaled(coef[:, 0], length), _from_scaled(coef[:, 1], length)
    if s[0] != 0.0:
        a, b = _shift(a, -s[0]), _shift(b, -s[0])
    return a, b


def _shift(coef, delta):
    """Coefficients of p(s + delta)."""
    c = np.polynomial.Polynomial(coef)(np.polynomial.Polynomial([delta, 1.0])).coef
    return np.pad(c, (0, 4 - len(c)))


def fit_straight(points, s) -> tuple[np.ndarray, np.ndarray]:
    """Chord from the first to the last point, as a degenerate cubic."""
    pts = np.asarray(points, dtype=float)
    s = np.asarray(s, dtype=float)
    length = float(s[-1] - s[0])
    if len(pts) < 2 or not length > 0:
        raise FitError("a straight primitive needs 2 distinct points")
    slope = (pts[-1] - pts[0]) / length
    a = np.array([pts[0, 0] - slope[0] * s[0], slope[0], 0.0, 0.0])
    b = np.array([pts[0, 1] - slope[1] * s[0], slope[1], 0.0, 0.0])
    return a, b


def deviations(a, b, points, s) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    s = np.asarray(s, dtype=float)
    return np.hypot(polyval(a, s) - pts[:, 0], polyval(b, s) - pts[:, 1])


@dataclass(eq=False)
class FittedPrimitive:
    """A fitted piece of the road: points ``id .. id+nbr-1`` of the polyline."""

    type: int
    id: int
    nbr: int
    a: np.ndarray
    b: np.ndarray
    length: float
    max_error: float
    run_index: int = 0

    def point(self, s):
        return np.stack([polyval(self.a, s), polyval(self.b, s)], axis=-1)

    def frame(self, s):
        """Unit tangent and signed curvature at local arc parameter ``s``."""
        dx, ddx = _derivatives(self.a, s)
        dy, ddy = _derivatives(self.b, s)
        speed = np.hypot(dx, dy)
        tangent = np.stack([dx / speed, dy / speed], axis=-1)
        return tangent, (dx * ddy - dy * ddx) / speed**3

    @property
    def run(self) -> PrimitiveRun:
        return PrimitiveRun(self.type, self.id, self.nbr, np.array(self.a), np.array(self.b))


def max_deviation(fit: FittedPrimitive | tuple, points, s) -> float:
    """Largest distance between an input point and the fit at the point's arc parameter."""
    a, b = (fit.a, fit.b) if isinstance(fit, FittedPrimitive) else fit
    return float(np.max(deviations(a, b, points, s)))


Fitter = Callable[[np.ndarray, np.ndarray], "tuple[np.ndarray, np.ndarray]"]


def fit_with_split(
    points,
    s=None,
    error_bound: float = DEFAULT_ERROR_BOUND,
    *,
    fitter: Fitter = fit_cubic_endpoint_constrained,
    type: int = 1,
    first: int = 0,
    run_index: int = 0,
) -> list[FittedPrimitive]:
    """Fit a run, halving it recursively until every piece deviates less than ``error_bound``.

    Halves share the middle point, so pieces meet at a real data point. Runs
    of at most four points are interpolated exactly by the endpoint-constrained
    cubic, which bounds the recursion.
    """
    if not error_bound > 0:
        raise ValueError("error bound must be positive")
    pts = np.asarray(points, dtype=float)
    s = local_arc_params(pts) if s is None else np.asarray(s, dtype=float) - s[0]

    out: list[FittedPrimitive] = []

    def recurse(lo: int, hi: int) -> None:
        sub_pts, sub_s = pts[lo:hi], s[lo:hi] - s[lo]
        a, b = fitter(sub_pts, sub_s)
        err = float(np.max(deviations(a, b, sub_pts, sub_s)))
        n = hi - lo
        if err >= error_bound and n > 2:
            mid = lo + (n - 1) // 2
            recurse(lo, mid + 1)
            recurse(mid, hi)
            return
        if err >= error_bound:
            raise FitError(f"two-point chord deviates {err:.3g} m")
        out.append(FittedPrimitive(type, first + lo, n, a, b, float(sub_s[-1]), err, run_index))

    recurse(0, len(pts))
    return out


@dataclass(eq=False)
class RoadModel:
    primitives: list[FittedPrimitive]
    road_width: float
    source: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.offsets = np.concatenate([[0.0], np.cumsum([p.length for p in self.primitives])])

    @property
    def total_length(self) -> float:
        return float(self.offsets[-1])

    @property
    def max_error(self) -> float:
        return max((p.max_error for p in self.primitives), default=0.0)


def _fit_spans(runs: Sequence[PrimitiveRun], n: int):
    """Point span of each run, extended by the next run's first point so
    neighbouring primitives meet. A trailing one-point run is already the
    end of the previous span and gets none."""
    for k, run in enumerate(runs):
        stop = min(run.stop + 1, n)
        if stop - run.id >= 2:
            yield k, run, run.id, stop


def build_model(
    polyline: RoadPolyline,
    labels,
    runs: Sequence[PrimitiveRun],
    config=None,
    *,
    error_bound: float | None = None,
    road_width: float | None = None,
) -> RoadModel:
    """Fit every run and assemble the road model.

    Straight runs become chords, turns endpoint-constrained cubics; both are
    split until the deviation bound holds. ``config`` (a PipelineConfig)
    supplies defaults for the keyword arguments. The fitted coefficients are
    also written back into ``runs``.
    """
    if error_bound is None:
        error_bound = config.error_bound if config is not None else DEFAULT_ERROR_BOUND
    if road_width is None:
        road_width = 2.0 * config.half_width if config is not None else 7.0
    pts = polyline.points
    n = len(pts)
    labels = np.asarray(labels)
    if len(labels) != n or sum(r.nbr for r in runs) != n:
        raise FitError("runs do not partition the polyline")

    primitives: list[FittedPrimitive] = []
    for k, run, lo, hi in _fit_spans(runs, n):
        fitter = fit_straight if run.type == STRAIGHT else fit_cubic_endpoint_constrained
        try:
            pieces = fit_with_split(
                pts[lo:hi], None, error_bound, fitter=fitter, type=run.type, first=lo, run_index=k
            )
        except RoadForgeError as exc:
            raise FitError(f"run {k} (points {lo}..{hi - 1}): {exc}") from exc
        run.param_x, run.param_y = np.array(pieces[0].a), np.array(pieces[0].b)
        primitives.extend(pieces)

    params = config.to_dict() if config is not None else {"error_bound": error_bound}
    return RoadModel(primitives, road_width, polyline.source_id, params)


def _locate(model: RoadModel, s):
    s = np.asarray(s, dtype=float)
    total = model.total_length
    tol = 1e-9 * max(total, 1.0)
    if np.any(s < -tol) or np.any(s > total + tol):
        raise ModelDomainError(f"arc length outside [0, {total}]")
    k = np.clip(np.searchsorted(model.offsets, s, side="right") - 1, 0, len(model.primitives) - 1)
    return k, s - model.offsets[k]


def eval_model(model: RoadModel, s):
    """Position, unit tangent and signed curvature at global arc length ``s``."""
    scalar = np.ndim(s) == 0
    k, local = _locate(model, np.atleast_1d(s))
    point = np.empty((len(local), 2))
    tangent = np.empty((len(local), 2))
    kappa = np.empty(len(local))
    for j in np.unique(k):
        sel = k == j
        prim = model.primitives[j]
        point[sel] = prim.point(local[sel])
        tangent[sel], kappa[sel] = prim.frame(local[sel])
    if scalar:
        return point[0], tangent[0], float(kappa[0])
    return point, tangent, kappa


def sample_arc(model: RoadModel, step: float) -> np.ndarray:
    """Evenly spaced global arc lengths covering the model, both ends included."""
    if not step > 0:
        raise ValueError("step must be positive")
    total = model.total_length
    count = max(int(math.ceil(total / step - 1e-9)), 1)
    return np.linspace(0.0, total, count + 1)


def offset_edges(model: RoadModel, half_width: float, step: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Left and right road edges, ``half_width`` either side of the centreline.

    Left is the side the tangent turns to when rotated +90 degrees.
    """
    if not half_width > 0:
        raise ValueError("half_width must be positive")
    s = sample_arc(model, step)
    point, tangent, kappa = eval_model(model, s)
    if np.any(half_width * np.abs(kappa) >= 1.0):
        warnings.warn(
            f"half width {half_width} m exceeds the local turning radius; edges self-intersect",
            RuntimeWarning,
            stacklevel=2,
        )
    normal = np.stack([-tangent[:, 1], tangent[:, 0]], axis=1)
    return point + half_width * normal, point - half_width * normal


def junction_diagnostics(model: RoadModel) -> list[dict]:
    """Position, heading and curvature mismatch at each junction.

    Only position continuity is guaranteed; the other two are reported.
    """
    out = []
    for k in range(len(model.primitives) - 1):
        left, right = model.primitives[k], model.primitives[k + 1]
        t0, k0 = left.frame(left.length)
        t1, k1 = right.frame(0.0)
        cross = t0[0] * t1[1] - t0[1] * t1[0]
        out.append(
            {
                "junction": k,
                "gap": float(np.hypot(*(left.point(left.length) - right.point(0.0)))),
                "heading_jump": float(math.atan2(cross, float(np.dot(t0, t1)))),
                "curvature_jump": float(k1 - k0),
            }
        )
    return out
