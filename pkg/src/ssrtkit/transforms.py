"""Discrete Radon transform and the scale space Radon transform (SSRT).

Two routes to the SSRT are provided:

* :func:`ssrt_from_radon` convolves every Radon projection along rho with a
  sampled 1-D Gaussian.  This is the fast path.
* :func:`ssrt_direct` evaluates the Gaussian-weighted line integral
  pixel by pixel.  It is slow and exists as an independent reference.

Sinogram values are indexed ``values[rho_bin, theta_bin]``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .imagecore import _as_normalized, centered_coordinates
from .validation import ValidationError, check_positive

__all__ = [
    "SinogramGrid",
    "Sinogram",
    "GaussianKernel1D",
    "radon",
    "gaussian_kernel_1d",
    "ssrt_from_radon",
    "ssrt_direct",
    "ssrt",
    "ssrt_at",
    "projection",
    "maclaurin_remainder_bound",
    "maclaurin_truncation_error",
]

DEFAULT_THETA_STEP = math.pi / 180.0
DEFAULT_RHO_STEP = 1.0
KERNEL_RADIUS_SIGMAS = 4.0


@dataclass(frozen=True)
class SinogramGrid:
    """Sampling of the (rho, theta) plane.

    ``theta_values`` cover [0, pi) uniformly; ``rho_values`` are symmetric
    about zero with an odd count so the middle bin sits exactly on rho = 0.
    """

    theta_values: np.ndarray
    rho_values: np.ndarray
    theta_step: float
    rho_step: float

    @classmethod
    def create(cls, rho_max, theta_step=DEFAULT_THETA_STEP, rho_step=DEFAULT_RHO_STEP):
        theta_step = check_positive(theta_step, "theta_step")
        rho_step = check_positive(rho_step, "rho_step")
        n_theta = int(round(math.pi / theta_step))
        if n_theta < 1 or not math.isclose(n_theta * theta_step, math.pi, rel_tol=1e-9):
            raise ValidationError(f"theta_step {theta_step} does not divide pi evenly")
        half = int(math.ceil(rho_max / rho_step - 1e-9))
        k = np.arange(-half, half + 1, dtype=np.float64)
        return cls(
            theta_values=np.arange(n_theta, dtype=np.float64) * theta_step,
            rho_values=k * rho_step,
            theta_step=theta_step,
            rho_step=rho_step,
        )

    @classmethod
    def for_shape(cls, shape, theta_step=DEFAULT_THETA_STEP, rho_step=DEFAULT_RHO_STEP,
                  margin=0.0):
        """Smallest grid whose rho range holds every pixel center of ``shape``
        (half the diagonal between extreme pixel centers), plus ``margin``
        pixels and one spare bin."""
        h, w = shape
        half_diag = 0.5 * math.hypot(w - 1, h - 1)
        return cls.create(half_diag + margin + rho_step, theta_step, rho_step)

    @property
    def rho_max(self):
        return float(self.rho_values[-1])

    @property
    def n_rho(self):
        return len(self.rho_values)

    @property
    def n_theta(self):
        return len(self.theta_values)

    @property
    def center_index(self):
        return self.n_rho // 2

    def covers(self, shape, origin=(0.0, 0.0)):
        h, w = shape
        reach = 0.5 * math.hypot(w - 1, h - 1) + math.hypot(*origin)
        return self.rho_max + 1e-9 >= reach

    def __eq__(self, other):
        if not isinstance(other, SinogramGrid):
            return NotImplemented
        return (
            self.theta_step == other.theta_step
            and self.rho_step == other.rho_step
            and np.array_equal(self.theta_values, other.theta_values)
            and np.array_equal(self.rho_values, other.rho_values)
        )

    __hash__ = None


@dataclass(frozen=True)
class Sinogram:
    grid: SinogramGrid
    values: np.ndarray
    kind: str
    sigma: float = None

    def __post_init__(self):
        if self.kind not in ("radon", "ssrt"):
            raise ValidationError(f"unknown sinogram kind {self.kind!r}")
        if (self.kind == "ssrt") != (self.sigma is not None):
            raise ValidationError("sigma must be given exactly when kind == 'ssrt'")
        if self.values.shape != (self.grid.n_rho, self.grid.n_theta):
            raise ValidationError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.grid.n_rho}, {self.grid.n_theta})"
            )


@dataclass(frozen=True)
class GaussianKernel1D:
    sigma: float
    rho_step: float
    support_radius: float
    samples: np.ndarray

    @property
    def offsets(self):
        k = (len(self.samples) - 1) // 2
        return np.arange(-k, k + 1) * self.rho_step


def _check_grid(grid, shape, origin=(0.0, 0.0)):
    if not grid.covers(shape, origin):
        raise ValidationError(
            f"grid too small: rho_max {grid.rho_max:.3f} is below half the "
            f"image diagonal for shape {shape}"
        )


def radon(img, grid=None, origin=(0.0, 0.0)):
    """Pixel-driven Radon transform.

    Every pixel's mass is deposited at ``rho = x cos(theta) + y sin(theta)``,
    split between the two neighbouring rho bins by linear interpolation, so
    each column conserves the image mass exactly.

    ``origin`` moves the coordinate origin (centered pixel coordinates).
    Projecting about ``(xc, yc)`` equals shifting every column by
    ``-(xc cos(theta) + yc sin(theta))`` before sampling, with no
    resampling loss.
    """
    img = _as_normalized(img)
    if grid is None:
        grid = SinogramGrid.for_shape(img.shape)
    _check_grid(grid, img.shape, origin)
    x, y = centered_coordinates(img.shape)
    mask = img.pixels != 0
    w, xs, ys = img.pixels[mask], x[mask] - origin[0], y[mask] - origin[1]

    cos_t = np.cos(grid.theta_values)
    sin_t = np.sin(grid.theta_values)
    # fractional bin position, relative to the rho = 0 bin
    pos = (np.outer(xs, cos_t) + np.outer(ys, sin_t)) / grid.rho_step
    lower = np.floor(pos)
    frac = pos - lower
    idx = lower.astype(np.int64) + grid.center_index
    n_rho, n_theta = grid.n_rho, grid.n_theta
    # the upper neighbour may fall off the grid only with zero weight
    if np.any((idx < 0) | (idx >= n_rho) | ((idx + 1 >= n_rho) & (frac > 0))):
        raise ValidationError("grid too small: a pixel projects outside the rho range")
    col = np.broadcast_to(np.arange(n_theta), idx.shape)
    weights = w[:, None]
    flat_lo = idx * n_theta + col
    out = np.bincount(flat_lo.ravel(), (weights * (1.0 - frac)).ravel(),
                      minlength=n_rho * n_theta)
    upper_ok = idx + 1 < n_rho
    flat_hi = (idx + 1) * n_theta + col
    out += np.bincount(flat_hi[upper_ok], np.broadcast_to(weights * frac, idx.shape)[upper_ok],
                       minlength=n_rho * n_theta)
    return Sinogram(grid, out.reshape(n_rho, n_theta), "radon")


def gaussian_kernel_1d(sigma, rho_step=DEFAULT_RHO_STEP):
    """Gaussian ``exp(-u^2 / 2 sigma^2) / (sqrt(2 pi) sigma)`` sampled on the
    rho grid out to ``4 sigma``.  Samples are not renormalised."""
    sigma = check_positive(sigma, "sigma")
    rho_step = check_positive(rho_step, "rho_step")
    k = int(math.ceil(KERNEL_RADIUS_SIGMAS * sigma / rho_step))
    u = np.arange(-k, k + 1) * rho_step
    samples = np.exp(-(u ** 2) / (2.0 * sigma ** 2)) / (math.sqrt(2.0 * math.pi) * sigma)
    return GaussianKernel1D(sigma, rho_step, k * rho_step, samples)


def ssrt_from_radon(radon_sino, kernel):
    """SSRT as the rho-wise convolution of a Radon sinogram with ``kernel``.

    The continuous convolution integral becomes a discrete sum over rho
    bins; boundaries are zero-padded.
    """
    if radon_sino.kind != "radon":
        raise ValidationError("ssrt_from_radon needs a radon sinogram")
    if not math.isclose(kernel.rho_step, radon_sino.grid.rho_step, rel_tol=1e-12):
        raise ValidationError(
            f"kernel spacing {kernel.rho_step} does not match grid spacing "
            f"{radon_sino.grid.rho_step}"
        )
    # radon bins hold mass, i.e. density * rho_step: no extra factor needed
    full = fftconvolve(radon_sino.values, kernel.samples[:, None], mode="full", axes=0)
    k = (len(kernel.samples) - 1) // 2
    values = full[k:k + radon_sino.grid.n_rho]
    np.maximum(values, 0.0, out=values)  # FFT round-off can dip below zero
    return Sinogram(radon_sino.grid, values, "ssrt", float(kernel.sigma))


def ssrt(img, sigma, grid=None):
    """Convenience wrapper: normalise, Radon transform, then convolve."""
    img = _as_normalized(img)
    if grid is None:
        grid = SinogramGrid.for_shape(img.shape)
    return ssrt_from_radon(radon(img, grid), gaussian_kernel_1d(sigma, grid.rho_step))


def ssrt_at(img, sigma, thetas, rhos, chunk=64):
    """Evaluate the Gaussian-weighted line integral at arbitrary points.

    ``thetas`` and ``rhos`` broadcast against each other; the result has
    their broadcast shape.
    """
    img = _as_normalized(img)
    sigma = check_positive(sigma, "sigma")
    thetas, rhos = np.broadcast_arrays(np.asarray(thetas, float), np.asarray(rhos, float))
    x, y = centered_coordinates(img.shape)
    mask = img.pixels != 0
    w, xs, ys = img.pixels[mask], x[mask], y[mask]
    t_flat, r_flat = thetas.ravel(), rhos.ravel()
    out = np.empty(t_flat.size)
    norm = 1.0 / (math.sqrt(2.0 * math.pi) * sigma)
    for start in range(0, t_flat.size, chunk):
        t = t_flat[start:start + chunk]
        r = r_flat[start:start + chunk]
        z = np.outer(np.cos(t), xs) + np.outer(np.sin(t), ys) - r[:, None]
        out[start:start + chunk] = norm * (np.exp(-(z * z) / (2.0 * sigma ** 2)) @ w)
    return out.reshape(thetas.shape)


def ssrt_direct(img, sigma, grid=None):
    """Reference SSRT: the Gaussian-weighted sum over all pixels at every
    grid node.  Cost is O(pixels x nodes)."""
    img = _as_normalized(img)
    if grid is None:
        grid = SinogramGrid.for_shape(img.shape)
    _check_grid(grid, img.shape)
    sigma = check_positive(sigma, "sigma")
    x, y = centered_coordinates(img.shape)
    mask = img.pixels != 0
    w, xs, ys = img.pixels[mask], x[mask], y[mask]
    norm = 1.0 / (math.sqrt(2.0 * math.pi) * sigma)
    values = np.empty((grid.n_rho, grid.n_theta))
    rho = grid.rho_values
    for j, theta in enumerate(grid.theta_values):
        p = xs * math.cos(theta) + ys * math.sin(theta)
        z = rho[:, None] - p[None, :]
        values[:, j] = norm * (np.exp(-(z * z) / (2.0 * sigma ** 2)) @ w)
    return Sinogram(grid, values, "ssrt", sigma)


def projection(sino, theta_index):
    """Copy of one theta column.  Returns ``(values, rho_values)``."""
    n = sino.grid.n_theta
    if not isinstance(theta_index, (int, np.integer)) or not 0 <= theta_index < n:
        raise IndexError(f"theta_index {theta_index!r} out of range [0, {n})")
    return sino.values[:, theta_index].copy(), sino.grid.rho_values.copy()


def maclaurin_remainder_bound(z, sigma):
    """Upper bound on ``|exp(-a) - (1 - a)|`` with ``a = z^2 / (2 sigma^2)``.

    This is the first omitted term of the alternating series, ``a^2 / 2``.
    """
    sigma = check_positive(sigma, "sigma")
    a = np.asarray(z, dtype=np.float64) ** 2 / (2.0 * sigma ** 2)
    bound = 0.5 * a ** 2
    return float(bound) if bound.ndim == 0 else bound


def maclaurin_truncation_error(z, sigma):
    """``|exp(-a) - (1 - a)|`` with ``a = z^2 / (2 sigma^2)``.

    For ``a <= 1`` the remainder is summed directly as
    ``a^2 * sum_k (-a)^k / (k + 2)!``, which keeps full relative precision;
    any closed form subtracts nearly equal numbers there.
    """
    sigma = check_positive(sigma, "sigma")
    a = float(z) ** 2 / (2.0 * sigma ** 2)
    if a > 1.0:
        return abs(math.expm1(-a) + a)
    total, term = 0.0, 0.5
    for k in range(30):
        total += term
        term *= -a / (k + 3)
    return a * a * total
