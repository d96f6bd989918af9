"""Binary rasterizers for test shapes and the random-bar generator.

A pixel is foreground when its center lies inside the shape.  Centers and
angles are given in centered image coordinates (``y`` pointing down), so a
shape centered at the origin and symmetric under ``(x, y) -> (-x, -y)``
rasterizes to an exactly point-symmetric array.
"""

import math

import numpy as np

from .imagecore import centered_coordinates


def _local(shape, center, angle):
    x, y = centered_coordinates(shape)
    dx, dy = x - center[0], y - center[1]
    c, s = math.cos(angle), math.sin(angle)
    return dx * c + dy * s, -dx * s + dy * c


def rectangle(shape, length, width, angle=0.0, center=(0.0, 0.0)):
    """Rectangle whose ``length`` side runs along ``angle`` (radians)."""
    u, v = _local(shape, center, angle)
    inside = (np.abs(u) <= length / 2.0) & (np.abs(v) <= width / 2.0)
    return inside.astype(np.float64)


def ellipse(shape, major, minor, angle=0.0, center=(0.0, 0.0)):
    """Ellipse with full axis lengths ``major`` and ``minor``."""
    u, v = _local(shape, center, angle)
    inside = (u / (major / 2.0)) ** 2 + (v / (minor / 2.0)) ** 2 <= 1.0
    return inside.astype(np.float64)


def disk(shape, radius, center=(0.0, 0.0)):
    return ellipse(shape, 2 * radius, 2 * radius, 0.0, center)


def cross(shape, length, width, angle=0.0, center=(0.0, 0.0)):
    """Plus sign made of two perpendicular bars sharing a center."""
    a = rectangle(shape, length, width, angle, center)
    b = rectangle(shape, length, width, angle + math.pi / 2, center)
    return np.maximum(a, b)


def convex_polygon(shape, vertices):
    """Fill a convex polygon given counter-clockwise or clockwise vertices."""
    x, y = centered_coordinates(shape)
    verts = np.asarray(vertices, dtype=np.float64)
    n = len(verts)
    signs = []
    for i in range(n):
        (x0, y0), (x1, y1) = verts[i], verts[(i + 1) % n]
        signs.append((x1 - x0) * (y - y0) - (y1 - y0) * (x - x0))
    signs = np.stack(signs)
    inside = np.all(signs >= 0, axis=0) | np.all(signs <= 0, axis=0)
    return inside.astype(np.float64)


def regular_polygon(shape, n_sides, radius, angle=0.0, center=(0.0, 0.0)):
    k = np.arange(n_sides)
    a = angle + 2 * math.pi * k / n_sides
    verts = np.column_stack([center[0] + radius * np.cos(a), center[1] + radius * np.sin(a)])
    return convex_polygon(shape, verts)
