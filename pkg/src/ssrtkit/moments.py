"""Second-order geometric moments, centroid and moment-based orientation."""

import math
from dataclasses import asdict, dataclass

from .imagecore import _as_normalized, centered_coordinates

__all__ = ["MomentSet", "Orientation", "compute_moments", "orientation_phi",
           "orientation_from_central", "DEGENERACY_TOL"]

DEGENERACY_TOL = 1e-9

REGULAR = "regular"
DIAGONAL_POS = "diagonal_pos"
DIAGONAL_NEG = "diagonal_neg"
ISOTROPIC = "isotropic"


@dataclass(frozen=True)
class MomentSet:
    """Raw moments of a unit-mass image and the derived central moments.

    All coordinates are centered pixel coordinates (see :mod:`imagecore`).
    """

    m00: float
    m10: float
    m01: float
    m11: float
    m20: float
    m02: float
    mu11: float
    mu20: float
    mu02: float
    xc: float
    yc: float

    @property
    def centroid(self):
        return (self.xc, self.yc)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Orientation:
    phi: float
    degenerate: str = REGULAR

    @property
    def is_isotropic(self):
        return self.degenerate == ISOTROPIC


def compute_moments(img):
    """Moments up to order two of the normalised image."""
    img = _as_normalized(img)
    f = img.pixels
    x, y = centered_coordinates(f.shape)
    m00 = float(f.sum())
    m10 = float((x * f).sum())
    m01 = float((y * f).sum())
    m11 = float((x * y * f).sum())
    m20 = float((x * x * f).sum())
    m02 = float((y * y * f).sum())
    # m00 == 1 up to rounding, so the centroid is (m10, m01)
    xc, yc = m10 / m00, m01 / m00
    return MomentSet(
        m00=m00, m10=m10, m01=m01, m11=m11, m20=m20, m02=m02,
        mu11=m11 - m01 * m10,
        mu20=m20 - m10 ** 2,
        mu02=m02 - m01 ** 2,
        xc=xc, yc=yc,
    )


def _orientation(num, den, tol):
    if abs(den) > tol:
        return Orientation(0.5 * math.atan2(2.0 * num, den))
    if num > tol:
        return Orientation(math.pi / 4, DIAGONAL_POS)
    if num < -tol:
        return Orientation(-math.pi / 4, DIAGONAL_NEG)
    return Orientation(0.0, ISOTROPIC)


def orientation_phi(m, tol=DEGENERACY_TOL):
    """Angle of the minimum-inertia axis from raw moments.

    ``tan(2 phi) = 2 (m11 - m01 m10) / (m20 - m02 + m01^2 - m10^2)``, with
    the root picked by ``phi = atan2(2N, D) / 2``: the direction of largest
    spread, i.e. the line about which the moment of inertia is smallest.
    When the denominator vanishes the axis is the +/- 45 degree diagonal
    by the sign of the numerator, or undefined (isotropic) when both do.
    """
    num = m.m11 - m.m01 * m.m10
    den = m.m20 - m.m02 + m.m01 ** 2 - m.m10 ** 2
    return _orientation(num, den, tol)


def orientation_from_central(m, tol=DEGENERACY_TOL):
    """Same angle computed from the central moments ``mu11, mu20, mu02``."""
    return _orientation(m.mu11, m.mu20 - m.mu02, tol)


def wrap_axis_angle(phi):
    """Map an axis angle into (-pi/2, pi/2]."""
    phi = math.fmod(phi, math.pi)
    if phi > math.pi / 2:
        phi -= math.pi
    elif phi <= -math.pi / 2:
        phi += math.pi
    return phi


def axis_angle_difference(a, b):
    """Smallest separation of two undirected axes, in [0, pi/2]."""
    d = abs(math.fmod(a - b, math.pi))
    return min(d, math.pi - d)
