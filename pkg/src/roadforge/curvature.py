"""Windowed least-squares estimation of signed curvature along a polyline.

Two estimators are available:

* ``"independent-coordinates"`` fits x(s) and y(s) separately as weighted
  quadratics in chord arc length and combines their derivatives.
* ``"implicit-parabola"`` fits y = f(x) (or x = f(y)) through the window
  centre and uses the graph-curvature formula.

Every window routine works on stacked windows of shape ``(..., m)`` so the
whole polyline is processed with a handful of numpy reductions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np

from .core import CurvatureSample, DegenerateWindowError, RoadPolyline, TooFewPointsError, cumulative_arc_length

Method = Literal["independent-coordinates", "implicit-parabola"]
METHODS: tuple[str, ...] = ("independent-coordinates", "implicit-parabola")

DEFAULT_Q = 4
# Relative floor on normal-equation determinants; scale-free so that
# rescaling the input never changes which windows are accepted.
_REL_DET_TOL = 1e-12
_SUPPORT_EPS = 1e-6


@dataclass(frozen=True)
class Window:
    center: int
    q: int
    start: int
    stop: int

    @property
    def members(self) -> range:
        return range(self.start, self.stop)


@dataclass(frozen=True)
class ParabolaFit:
    f1: float
    f2: float
    axis: Literal["x", "y"]
    # +1 when the polyline runs towards increasing abscissa, -1 otherwise.
    direction: int = 1


@dataclass(frozen=True)
class QuadraticLocalModel:
    x1: float
    x2: float
    y1: float
    y2: float


def window_bounds(n: int, q: int) -> tuple[np.ndarray, int]:
    """Start index of the (clamped) window of every point, and the window size."""
    m = min(2 * q + 1, n)
    starts = np.clip(np.arange(n) - q, 0, n - m)
    return starts, m


def window(n: int, center: int, q: int) -> Window:
    starts, m = window_bounds(n, q)
    start = int(starts[center])
    return Window(center, q, start, start + m)


def weight(l, l_max: float):
    """Compactly supported kernel ``(1 - (l/l_max)^2)^2``, zero for ``|l| >= l_max``."""
    if l_max <= 0:
        raise ValueError("l_max must be positive")
    u2 = (np.asarray(l, dtype=float) / l_max) ** 2
    w = np.where(u2 < 1.0, (1.0 - u2) ** 2, 0.0)
    return float(w) if w.ndim == 0 else w


def window_weights(l: np.ndarray) -> np.ndarray:
    """Kernel weights for centred window arc lengths ``l`` of shape ``(..., m)``.

    The support radius sits just beyond the farthest member so that every
    member keeps a (possibly tiny) positive weight.
    """
    l = np.asarray(l, dtype=float)
    l_max = np.max(np.abs(l), axis=-1, keepdims=True) * (1.0 + _SUPPORT_EPS)
    u2 = (l / l_max) ** 2
    return (1.0 - u2) ** 2


# -- independent coordinates -------------------------------------------------


def _solve_independent(dx, dy, l, w):
    a1 = np.sum(w * l**2, axis=-1)
    a2 = 0.5 * np.sum(w * l**3, axis=-1)
    a3 = 0.25 * np.sum(w * l**4, axis=-1)
    bx1 = np.sum(w * l * dx, axis=-1)
    by1 = np.sum(w * l * dy, axis=-1)
    bx2 = 0.5 * np.sum(w * l**2 * dx, axis=-1)
    by2 = 0.5 * np.sum(w * l**2 * dy, axis=-1)
    d = a1 * a3 - a2**2
    bad = ~(np.abs(d) > _REL_DET_TOL * a1 * a3)
    with np.errstate(divide="ignore", invalid="ignore"):
        x1 = (a3 * bx1 - a2 * bx2) / d
        y1 = (a3 * by1 - a2 * by2) / d
        x2 = (a1 * bx2 - a2 * bx1) / d
        y2 = (a1 * by2 - a2 * by1) / d
    return x1, x2, y1, y2, bad


def fit_independent_coordinates(points, l, weights=None) -> QuadraticLocalModel:
    """Weighted quadratic fit of x(l) and y(l) around the window member with ``l == 0``.

    ``l`` must be centred (zero at the window centre). Uniform weights are used
    when ``weights`` is None.
    """
    pts = np.asarray(points, dtype=float)
    l = np.asarray(l, dtype=float)
    if len(pts) != len(l):
        raise ValueError("points and arc lengths differ in length")
    if len(pts) < 3:
        raise TooFewPointsError("need at least 3 points for a quadratic fit")
    w = np.ones_like(l) if weights is None else np.asarray(weights, dtype=float)
    center = int(np.argmin(np.abs(l)))
    rel = pts - pts[center]
    x1, x2, y1, y2, bad = _solve_independent(rel[:, 0], rel[:, 1], l, w)
    if bad:
        raise DegenerateWindowError("singular arc-length normal equations")
    return QuadraticLocalModel(float(x1), float(x2), float(y1), float(y2))


def _frame(x1, x2, y1, y2):
    speed = np.hypot(x1, y1)
    kappa = (x1 * y2 - y1 * x2) / speed**3
    tx, ty = x1 / speed, y1 / speed
    sgn = np.where(kappa < 0, -1.0, 1.0)
    return kappa, np.stack([tx, ty], axis=-1), np.stack([-ty * sgn, tx * sgn], axis=-1)


def curvature_at(model: QuadraticLocalModel) -> tuple[float, np.ndarray, np.ndarray]:
    """Signed curvature, unit tangent and unit normal of a local quadratic model.

    The normal is the tangent turned +90 degrees, flipped when the curvature
    is negative; a zero curvature keeps the unflipped normal.
    """
    if np.hypot(model.x1, model.y1) <= 1e-12:
        raise DegenerateWindowError("vanishing tangent in local model")
    kappa, t, n = _frame(model.x1, model.x2, model.y1, model.y2)
    return float(kappa), t, n


# -- implicit parabola -------------------------------------------------------


def _choose_axis(rel: np.ndarray) -> np.ndarray:
    """True where x is the abscissa. Decided by net displacement across the
    window, falling back to coordinate range for closed windows."""
    net = np.abs(rel[..., -1, :] - rel[..., 0, :])
    spread = np.ptp(rel, axis=-2)
    use_net = np.max(net, axis=-1) > 1e-9 * np.maximum(np.max(spread, axis=-1), 1e-300)
    score = np.where(use_net[..., None], net, spread)
    return score[..., 0] >= score[..., 1]


def _solve_parabola(u, v):
    a = np.sum(u**2, axis=-1)
    g = np.sum(u * v, axis=-1)
    b = 0.5 * np.sum(u**3, axis=-1)
    h = 0.5 * np.sum(u**2 * v, axis=-1)
    c = 0.25 * np.sum(u**4, axis=-1)
    det = a * c - b**2
    bad = ~(np.abs(det) > _REL_DET_TOL * a * c)
    with np.errstate(divide="ignore", invalid="ignore"):
        f1 = (c * g - b * h) / det
        f2 = (a * h - b * g) / det
    return f1, f2, bad


def _parabola_batch(rel: np.ndarray, axis: str | None = None):
    if axis is None:
        x_axis = _choose_axis(rel)
    elif axis in ("x", "y"):
        x_axis = np.full(rel.shape[:-2], axis == "x")
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    u = np.where(x_axis[..., None], rel[..., 0], rel[..., 1])
    v = np.where(x_axis[..., None], rel[..., 1], rel[..., 0])
    f1, f2, bad = _solve_parabola(u, v)
    direction = np.where(u[..., -1] - u[..., 0] < 0, -1, 1)
    return f1, f2, x_axis, direction, bad


def fit_parabola_implicit(points, center: int | None = None, axis: str | None = None) -> ParabolaFit:
    """Least-squares osculating parabola through the window centre.

    The centre (middle point by default) is moved to the origin before
    fitting. Unless ``axis`` forces it, the abscissa is the coordinate that
    travels farther across the window.
    """
    pts = np.asarray(points, dtype=float)
    if len(pts) < 3:
        raise TooFewPointsError("need at least 3 points for a parabola fit")
    center = len(pts) // 2 if center is None else center
    rel = pts - pts[center]
    if np.max(np.ptp(rel, axis=0)) <= 1e-12:
        raise DegenerateWindowError("window points are coincident")
    f1, f2, x_axis, direction, bad = _parabola_batch(rel, axis)
    if bad:
        raise DegenerateWindowError("singular parabola normal equations")
    return ParabolaFit(float(f1), float(f2), "x" if x_axis else "y", int(direction))


def _parabola_kappa(f1, f2, x_axis, direction):
    kappa = f2 / (1.0 + f1**2) ** 1.5
    # x = f(y) traces the curve with the opposite orientation to y = f(x).
    return np.where(x_axis, kappa, -kappa) * direction


def curvature_from_parabola(fit: ParabolaFit) -> float:
    return float(_parabola_kappa(fit.f1, fit.f2, fit.axis == "x", fit.direction))


def _parabola_tangent(f1, x_axis, direction):
    norm = np.sqrt(1.0 + f1**2)
    along = direction / norm
    tx = np.where(x_axis, along, f1 * along)
    ty = np.where(x_axis, f1 * along, along)
    return tx, ty


# -- whole polyline ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CurvatureProfile:
    """Per-point curvature estimates, stored column-wise.

    Indexing or iterating yields :class:`CurvatureSample` records.
    """

    s: np.ndarray
    kappa: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    method: str
    q: int

    def __len__(self) -> int:
        return len(self.kappa)

    def __getitem__(self, i: int) -> CurvatureSample:
        i = range(len(self))[i]
        return CurvatureSample(i, float(self.s[i]), float(self.kappa[i]), self.tangent[i], self.normal[i])

    def __iter__(self) -> Iterator[CurvatureSample]:
        return (self[i] for i in range(len(self)))


def _windows(pts: np.ndarray, q: int):
    n = len(pts)
    starts, m = window_bounds(n, q)
    idx = starts[:, None] + np.arange(m)
    rel = pts[idx] - pts[:, None, :]
    return idx, rel


def estimate_curvature(
    polyline: RoadPolyline | np.ndarray,
    q: int = DEFAULT_Q,
    method: Method = "independent-coordinates",
) -> CurvatureProfile:
    """Estimate signed curvature, tangent and normal at every point.

    Windows of ``2q+1`` points are centred on each point and shifted inwards
    near the ends so they never shrink.
    """
    pts = polyline.points if isinstance(polyline, RoadPolyline) else np.asarray(polyline, dtype=float)
    if q < 2:
        raise ValueError(f"half-width q must be >= 2, got {q}")
    if method not in METHODS:
        raise ValueError(f"unknown curvature method {method!r}; choose from {METHODS}")
    n = len(pts)
    if n < 2 * q + 1:
        raise TooFewPointsError(f"{n} points is shorter than one window of {2 * q + 1}")

    s = cumulative_arc_length(pts)
    idx, rel = _windows(pts, q)

    if method == "independent-coordinates":
        l = s[idx] - s[:, None]
        x1, x2, y1, y2, bad = _solve_independent(rel[..., 0], rel[..., 1], l, window_weights(l))
        bad |= ~(np.hypot(x1, y1) > 1e-12)
        _raise_if_bad(bad)
        kappa, tangent, normal = _frame(x1, x2, y1, y2)
    else:
        f1, f2, x_axis, direction, bad = _parabola_batch(rel)
        _raise_if_bad(bad)
        kappa = _parabola_kappa(f1, f2, x_axis, direction)
        tangent = np.stack(_parabola_tangent(f1, x_axis, direction), axis=-1)
        sgn = np.where(kappa < 0, -1.0, 1.0)
        normal = np.stack([-tangent[:, 1] * sgn, tangent[:, 0] * sgn], axis=-1)

    return CurvatureProfile(s, kappa, tangent, normal, method, q)


def _raise_if_bad(bad: np.ndarray) -> None:
    if np.any(bad):
        i = int(np.argmax(bad))
        raise DegenerateWindowError(f"degenerate curvature window at point {i}")
