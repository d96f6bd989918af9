"""Principal inertia axis from the maximum of the SSRT.

With a scale at least as large as the object, the SSRT has a single
maximum ``(theta_hat, rho_hat)`` and the line
``x cos(theta_hat) + y sin(theta_hat) = rho_hat`` coincides with the
minimum-inertia axis through the centroid, oriented at
``theta_hat - pi/2``.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import ndimage

from .imagecore import _as_normalized, as_gray
from .moments import (
    axis_angle_difference,
    compute_moments,
    orientation_phi,
    wrap_axis_angle,
)
from .transforms import ssrt_at
from .validation import EmptyObjectError, IsotropicObjectError, ValidationError, check_binary

__all__ = [
    "AxisEstimate",
    "AxisDiff",
    "HessianCheck",
    "convex_hull",
    "diameter",
    "select_sigma",
    "ssrt_argmax",
    "axis_from_maximum",
    "moments_axis",
    "compare_axes",
    "hessian_check",
    "maximum_regions",
]


@dataclass(frozen=True)
class AxisEstimate:
    theta_hat: float
    rho_hat: float
    phi_star: float
    anchor: tuple
    source: str

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class AxisDiff:
    angle_diff: float
    centroid_distance: float


@dataclass(frozen=True)
class HessianCheck:
    """Second derivatives of the SSRT at a critical point.

    ``h11`` is d2/dtheta2 (theta in radians), ``h22`` is d2/drho2 (rho in
    pixels).  ``h12`` and ``h21`` are the mixed derivative evaluated with the
    two nesting orders.
    """

    h11: float
    h22: float
    h12: float
    h21: float
    det: float
    sigma: float

    @property
    def is_maximum(self):
        return self.h11 < 0 and self.det > 0

    @property
    def h22_scaled(self):
        """``h22`` with rho measured in units of ``sqrt(2) * sigma``.

        At a critical point on a well-resolved object this tends to
        ``-2 / (sqrt(2 pi) sigma)``.
        """
        return self.h22 * 2.0 * self.sigma ** 2


# -- sigma selection ------------------------------------------------------------

def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points):
    """Andrew's monotone chain.  Returns hull vertices counter-clockwise
    without collinear points; degenerate inputs give 1 or 2 vertices."""
    pts = sorted(set(map(tuple, np.asarray(points, dtype=np.float64).tolist())))
    if len(pts) <= 2:
        return np.array(pts)
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def diameter(points):
    """Largest pairwise distance, by rotating calipers over the hull."""
    hull = convex_hull(points)
    n = len(hull)
    if n < 2:
        return 0.0
    if n == 2:
        return float(np.hypot(*(hull[0] - hull[1])))
    best = 0.0
    j = 1
    for i in range(n):
        a, b = hull[i], hull[(i + 1) % n]
        # advance j while the area (distance from edge ab) keeps growing
        while abs(_cross(a, b, hull[(j + 1) % n])) > abs(_cross(a, b, hull[j])):
            j = (j + 1) % n
        for p in (a, b):
            d = hull[j] - p
            best = max(best, d[0] * d[0] + d[1] * d[1])
    return math.sqrt(best)


def select_sigma(img, mode="binary_object"):
    """Scale giving a single SSRT maximum.

    ``binary_object``: the diameter of the foreground pixel centers.
    ``grayscale``: the image diagonal ``sqrt(width^2 + height^2)``.
    """
    img = as_gray(img)
    if mode == "grayscale":
        return math.hypot(img.width, img.height)
    if mode != "binary_object":
        raise ValidationError(f"unknown sigma mode {mode!r}")
    check_binary(img.pixels)
    rows, cols = np.nonzero(img.pixels)
    if len(rows) < 2:
        raise EmptyObjectError("empty object: binary_object mode needs at least two foreground pixels")
    d = diameter(np.column_stack([cols, rows]))
    if d == 0.0:
        raise EmptyObjectError("empty object: foreground has zero extent")
    return d


# -- maximum extraction -------------------------------------------------------------

def _parabolic_offset(left, mid, right):
    denom = left - 2.0 * mid + right
    if denom >= 0.0:
        return 0.0
    return float(np.clip(0.5 * (left - right) / denom, -0.5, 0.5))


def _wrap_line(theta, rho):
    if theta < 0.0:
        return theta + math.pi, -rho
    if theta >= math.pi:
        return theta - math.pi, -rho
    return theta, rho


def ssrt_argmax(sino, refine=True):
    """Grid node of the largest SSRT value, optionally refined.

    Ties go to the smallest theta index, then the smallest rho index.
    Refinement fits a parabola through the peak and its two neighbours
    along rho and, separately, along theta.  Theta wraps around using
    ``S(rho, theta + pi) = S(-rho, theta)``.
    """
    if sino.kind != "ssrt":
        raise ValidationError("ssrt_argmax needs an ssrt sinogram")
    v = sino.values
    if not np.any(v > 0):
        raise ValidationError("all-zero sinogram has no maximum")
    grid = sino.grid
    n_rho, n_theta = v.shape
    flat = int(np.argmax(v.T.ravel()))
    j, i = divmod(flat, n_rho)
    theta = float(grid.theta_values[j])
    rho = float(grid.rho_values[i])
    if not refine:
        return theta, rho

    if 0 < i < n_rho - 1:
        rho += _parabolic_offset(v[i - 1, j], v[i, j], v[i + 1, j]) * grid.rho_step
    if n_theta >= 3:
        left = v[i, j - 1] if j > 0 else v[n_rho - 1 - i, n_theta - 1]
        right = v[i, j + 1] if j < n_theta - 1 else v[n_rho - 1 - i, 0]
        theta += _parabolic_offset(left, v[i, j], right) * grid.theta_step
    return _wrap_line(theta, rho)


def axis_from_maximum(theta_hat, rho_hat):
    """Line ``x cos(theta) + y sin(theta) = rho`` as an axis estimate."""
    theta_hat, rho_hat = _wrap_line(float(theta_hat), float(rho_hat))
    anchor = (rho_hat * math.cos(theta_hat), rho_hat * math.sin(theta_hat))
    return AxisEstimate(theta_hat, rho_hat, wrap_axis_angle(theta_hat - math.pi / 2),
                        anchor, "ssrt")


def moments_axis(img):
    """Minimum-inertia line through the centroid, from moments."""
    m = compute_moments(img)
    orient = orientation_phi(m)
    if orient.is_isotropic:
        raise IsotropicObjectError("isotropic object: second moments define no axis")
    theta = orient.phi + math.pi / 2
    rho = m.xc * math.cos(theta) + m.yc * math.sin(theta)
    theta, rho = _wrap_line(theta, rho)
    return AxisEstimate(theta, rho, orient.phi, (m.xc, m.yc), "moments")


def compare_axes(a, b, centroid):
    """Angular gap between two axes and the distance of ``centroid`` from ``a``."""
    dist = abs(centroid[0] * math.cos(a.theta_hat) + centroid[1] * math.sin(a.theta_hat)
               - a.rho_hat)
    return AxisDiff(axis_angle_difference(a.theta_hat, b.theta_hat), dist)


# -- maximum conditions -------------------------------------------------------------

def hessian_check(img, sigma, theta_hat, rho_hat, theta_step=math.pi / 180, rho_step=1.0,
                  rho_limit=None):
    """Central finite differences of the direct SSRT around a critical point.

    ``rho_limit`` is the half-width of the rho range the point was found in;
    the stencil must stay inside it.
    """
    img = _as_normalized(img)
    if rho_limit is None:
        h, w = img.shape
        rho_limit = 0.5 * math.hypot(w - 1, h - 1)
    if abs(rho_hat) + rho_step > rho_limit:
        raise ValidationError("critical point too close to the rho boundary for the stencil")
    ht, hr = theta_step, rho_step
    dt = np.array([-ht, 0.0, ht])
    dr = np.array([-hr, 0.0, hr])
    s = ssrt_at(img, sigma, theta_hat + dt[:, None], rho_hat + dr[None, :])
    # s[a, b]: theta offset a, rho offset b
    h11 = (s[2, 1] - 2 * s[1, 1] + s[0, 1]) / ht ** 2
    h22 = (s[1, 2] - 2 * s[1, 1] + s[1, 0]) / hr ** 2
    d_rho = (s[:, 2] - s[:, 0]) / (2 * hr)
    h12 = (d_rho[2] - d_rho[0]) / (2 * ht)
    d_theta = (s[2, :] - s[0, :]) / (2 * ht)
    h21 = (d_theta[2] - d_theta[0]) / (2 * hr)
    return HessianCheck(float(h11), float(h22), float(h12), float(h21),
                        float(h11 * h22 - h12 * h21), float(sigma))


def maximum_regions(sino, rel_tol=1e-3):
    """Number of connected plateaus within ``rel_tol`` of the global maximum.

    Components touching the theta = 0 and theta = pi edges are merged when
    they meet at mirrored rho (the sinogram is periodic up to reflection).
    """
    v = sino.values
    mask = v >= v.max() * (1.0 - rel_tol)
    labels, n = ndimage.label(mask, structure=np.ones((3, 3)))
    if n <= 1:
        return n
    parent = list(range(n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    first, last = labels[:, 0], labels[::-1, -1]
    n_rho = len(first)
    for i in range(n_rho):
        if not first[i]:
            continue
        for k in (i - 1, i, i + 1):
            if 0 <= k < n_rho and last[k]:
                parent[find(first[i])] = find(last[k])
    return len({find(a) for a in range(1, n + 1)})
