"""Synthetic road fixtures with exact geometry and ground-truth labels.

Roads are chains of tangent pieces ``(length, curvature)``; points are
sampled at uniform true arc length.
"""

from __future__ import annotations

import math

import numpy as np


def sample_pieces(pieces, spacing, start=(0.0, 0.0), heading=0.0):
    """Return (points, labels, boundaries).

    ``labels`` is the curvature sign of the piece owning each point and
    ``boundaries`` the index of the first point of every piece after the first.
    """
    total = sum(length for length, _ in pieces)
    n = int(math.floor(total / spacing + 1e-9)) + 1
    s = np.arange(n) * spacing
    pts = np.empty((n, 2))
    labels = np.zeros(n, dtype=int)
    boundaries = []
    x, y, th, s0 = start[0], start[1], heading, 0.0
    for k, (length, kappa) in enumerate(pieces):
        last = k == len(pieces) - 1
        sel = (s >= s0 - 1e-9) & ((s < s0 + length - 1e-9) | last)
        if k:
            boundaries.append(int(np.argmax(sel)) if sel.any() else n)
        u = s[sel] - s0
        if abs(kappa) < 1e-15:
            pts[sel] = np.column_stack([x + u * math.cos(th), y + u * math.sin(th)])
        else:
            r = 1.0 / kappa
            pts[sel] = np.column_stack(
                [x + r * (np.sin(th + kappa * u) - math.sin(th)), y - r * (np.cos(th + kappa * u) - math.cos(th))]
            )
        labels[sel] = int(np.sign(kappa))
        if abs(kappa) < 1e-15:
            x, y = x + length * math.cos(th), y + length * math.sin(th)
        else:
            r = 1.0 / kappa
            x, y = x + r * (math.sin(th + kappa * length) - math.sin(th)), y - r * (
                math.cos(th + kappa * length) - math.cos(th)
            )
            th += kappa * length
        s0 += length
    return pts, labels, boundaries


def circle(radius, spacing, n, clockwise=False):
    th = np.arange(n) * spacing / radius
    if clockwise:
        th = -th
    return np.column_stack([radius * np.cos(th), radius * np.sin(th)])


def s_road(spacing=5.0, radius=100.0, arc=250.0, straight=200.0):
    """Positive-curvature arc, straight, negative-curvature arc."""
    return sample_pieces([(arc, 1 / radius), (straight, 0.0), (arc, -1 / radius)], spacing)


def rigid(points, angle, shift):
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return points @ rot.T + np.asarray(shift)


def reflect(points):
    return points * np.array([1.0, -1.0])


def fixture_suite():
    """Ten (name, points) roads mixing arcs of radius 20-500 m with straights."""
    rng = np.random.default_rng(20261014)
    specs = [
        ("r20-hairpins", [(60, 0), (50, 1 / 20), (40, 0), (50, -1 / 20), (60, 0)], 1.0, 0.0),
        ("r50-s-curve", [(100, 0), (120, 1 / 50), (80, 0), (120, -1 / 50), (100, 0)], 1.5, 0.0),
        ("r100-s-road", [(250, 1 / 100), (200, 0), (250, -1 / 100)], 3.0, 0.0),
        ("r500-sweeper", [(300, 0), (800, 1 / 500), (300, 0), (600, -1 / 500)], 5.0, 0.0),
        ("mixed-long", [(400, 0), (150, 1 / 50), (300, 0), (300, -1 / 100), (500, 1 / 500), (200, 0)], 2.0, 0.0),
        ("r20-noisy", [(80, 0), (60, 1 / 20), (80, 0), (60, -1 / 20)], 1.0, 0.3),
        ("r50-noisy", [(200, 0), (150, -1 / 50), (150, 0), (150, 1 / 50), (200, 0)], 2.0, 0.3),
        ("r100-noisy", [(300, 0), (300, 1 / 100), (300, -1 / 100), (300, 0)], 3.0, 0.3),
        ("r500-noisy", [(500, 0), (1000, -1 / 500), (500, 0)], 5.0, 0.3),
        ("mixed-noisy", [(200, 0), (100, 1 / 20), (200, 0), (200, -1 / 100), (600, 1 / 500), (300, 0)], 1.0, 0.3),
    ]
    out = []
    for name, pieces, spacing, sigma in specs:
        pts, _, _ = sample_pieces(pieces, spacing)
        if sigma:
            pts = pts + rng.normal(0.0, sigma, pts.shape)
        out.append((name, pts))
    return out
