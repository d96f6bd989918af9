"""scikit-learn compatible wrappers.

Images go in as a single 2-D array, a 3-D stack, or a sequence of 2-D
arrays.  All estimators are stateless with respect to the data: ``fit``
only validates hyper-parameters, so they drop into pipelines and
``GridSearchCV`` without surprises.
"""

import math

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .imagecore import as_gray
from .inertia import (
    axis_from_maximum,
    compare_axes,
    moments_axis,
    select_sigma,
    ssrt_argmax,
)
from .moments import compute_moments
from .symmetry import SHIFT_MODES, SymmetryParams, check_central_symmetry
from .transforms import SinogramGrid, radon, ssrt, ssrt_direct
from .validation import IsotropicObjectError, ValidationError, check_image_stack, check_positive


def _check_steps(theta_step_deg, rho_step):
    check_positive(theta_step_deg, "theta_step_deg")
    check_positive(rho_step, "rho_step")
    n = 180.0 / theta_step_deg
    if abs(n - round(n)) > 1e-9:
        raise ValidationError(f"theta_step_deg must divide 180, got {theta_step_deg!r}")


def _resolve_sigma(img, sigma, sigma_mode):
    if sigma is not None:
        return float(sigma)
    if sigma_mode == "auto":
        sigma_mode = "binary_object" if as_gray(img).is_binary() else "grayscale"
    return select_sigma(img, sigma_mode)


class SSRTTransformer(TransformerMixin, BaseEstimator):
    """Map images to SSRT (or Radon) sinograms.

    Parameters
    ----------
    sigma : float or None
        Scale in pixels.  ``None`` picks it per image with ``sigma_mode``.
    sigma_mode : {"auto", "binary_object", "grayscale"}
        ``auto`` uses the object diameter for binary images and the image
        diagonal otherwise.
    theta_step_deg, rho_step : float
        Sinogram sampling.
    method : {"convolution", "direct", "radon"}
        ``radon`` skips the Gaussian and returns the plain Radon transform.
    """

    def __init__(self, sigma=None, sigma_mode="auto", theta_step_deg=1.0, rho_step=1.0,
                 method="convolution"):
        self.sigma = sigma
        self.sigma_mode = sigma_mode
        self.theta_step_deg = theta_step_deg
        self.rho_step = rho_step
        self.method = method

    def fit(self, X, y=None):
        _check_steps(self.theta_step_deg, self.rho_step)
        if self.sigma is not None:
            check_positive(self.sigma, "sigma")
        if self.method not in ("convolution", "direct", "radon"):
            raise ValidationError(f"unknown method {self.method!r}")
        images, _ = check_image_stack(X)
        shapes = {im.shape for im in images}
        if len(shapes) != 1:
            raise ValidationError(f"all images must share one shape, got {sorted(shapes)}")
        self.image_shape_ = shapes.pop()
        self.grid_ = SinogramGrid.for_shape(self.image_shape_, math.radians(self.theta_step_deg),
                                            self.rho_step)
        return self

    def _one(self, img):
        if self.method == "radon":
            return radon(img, self.grid_)
        sigma = _resolve_sigma(img, self.sigma, self.sigma_mode)
        if self.method == "direct":
            return ssrt_direct(img, sigma, self.grid_)
        return ssrt(img, sigma, self.grid_)

    def transform_sinograms(self, X):
        """Like :meth:`transform` but returns :class:`Sinogram` objects."""
        check_is_fitted(self, "grid_")
        images, _ = check_image_stack(X)
        for im in images:
            if im.shape != self.image_shape_:
                raise ValidationError(f"image shape {im.shape} differs from fitted {self.image_shape_}")
        return [self._one(im) for im in images]

    def transform(self, X):
        """Sinogram values, ``(n_rho, n_theta)`` per image."""
        sinos = self.transform_sinograms(X)
        _, single = check_image_stack(X)
        out = np.stack([s.values for s in sinos])
        return out[0] if single else out


class InertiaAxisEstimator(TransformerMixin, BaseEstimator):
    """Principal inertia axis from the SSRT maximum.

    ``transform`` returns one row ``[theta_hat, rho_hat, phi_star]``
    (radians, pixels, radians) per image.  After ``fit`` on a single image
    the estimate is also kept in ``axis_`` together with ``sigma_`` and the
    moment-based reference axis ``moments_axis_`` (``None`` when the object
    is isotropic).
    """

    def __init__(self, sigma=None, sigma_mode="auto", theta_step_deg=1.0, rho_step=1.0,
                 refine=True):
        self.sigma = sigma
        self.sigma_mode = sigma_mode
        self.theta_step_deg = theta_step_deg
        self.rho_step = rho_step
        self.refine = refine

    def estimate(self, img):
        _check_steps(self.theta_step_deg, self.rho_step)
        sigma = _resolve_sigma(img, self.sigma, self.sigma_mode)
        grid = SinogramGrid.for_shape(np.shape(as_gray(img).pixels),
                                      math.radians(self.theta_step_deg), self.rho_step)
        sino = ssrt(img, sigma, grid)
        theta, rho = ssrt_argmax(sino, refine=self.refine)
        return axis_from_maximum(theta, rho), sigma, sino

    def fit(self, X, y=None):
        images, _ = check_image_stack(X)
        self.axis_, self.sigma_, self.sinogram_ = self.estimate(images[0])
        try:
            self.moments_axis_ = moments_axis(images[0])
        except IsotropicObjectError:
            self.moments_axis_ = None
        m = compute_moments(images[0])
        self.centroid_ = m.centroid
        self.axis_diff_ = (None if self.moments_axis_ is None
                           else compare_axes(self.axis_, self.moments_axis_, self.centroid_))
        return self

    def transform(self, X):
        images, _ = check_image_stack(X)
        rows = []
        for im in images:
            ax, _, _ = self.estimate(im)
            rows.append([ax.theta_hat, ax.rho_hat, ax.phi_star])
        return np.asarray(rows)


class CentralSymmetryClassifier(ClassifierMixin, BaseEstimator):
    """Binary classifier: ``True`` for centrally symmetric objects.

    Parameters mirror :class:`~ssrtkit.symmetry.SymmetryParams`; angles are
    in degrees here so they read naturally in a parameter grid.
    """

    def __init__(self, epsilon=0.03, delta_theta_deg=5.0, sigma_sym=1.0, m_percent=10.0,
                 theta_step_deg=1.0, rho_step=1.0, exact_angles=False, shift_mode="exact"):
        self.epsilon = epsilon
        self.delta_theta_deg = delta_theta_deg
        self.sigma_sym = sigma_sym
        self.m_percent = m_percent
        self.theta_step_deg = theta_step_deg
        self.rho_step = rho_step
        self.exact_angles = exact_angles
        self.shift_mode = shift_mode

    def _params(self):
        return SymmetryParams(epsilon=self.epsilon,
                              delta_theta=math.radians(self.delta_theta_deg),
                              sigma_sym=self.sigma_sym, m_percent=self.m_percent)

    def fit(self, X=None, y=None):
        _check_steps(self.theta_step_deg, self.rho_step)
        self._params()
        if self.shift_mode not in SHIFT_MODES:
            raise ValidationError(f"shift_mode must be one of {SHIFT_MODES}")
        self.classes_ = np.array([False, True])
        return self

    def report(self, img, short_circuit=True):
        check_is_fitted(self, "classes_")
        return check_central_symmetry(
            img, self._params(), theta_step=math.radians(self.theta_step_deg),
            rho_step=self.rho_step, exact_angles=self.exact_angles,
            shift_mode=self.shift_mode, short_circuit=short_circuit,
        )

    def predict(self, X):
        images, _ = check_image_stack(X)
        return np.array([self.report(im).sym for im in images], dtype=bool)

    def decision_function(self, X):
        """``epsilon - max(D)`` over the three projections; positive means
        symmetric."""
        images, _ = check_image_stack(X)
        return np.array([self.epsilon - max(self.report(im, short_circuit=False).d_values)
                         for im in images])
