"""Scale Space Radon Transform toolkit.

Sinograms of 2-D images at a chosen Gaussian scale, principal-axis
estimation from the transform maximum, and a three-projection test for
central symmetry of binary objects.
"""

__version__ = "0.1.0"

from .estimators import CentralSymmetryClassifier, InertiaAxisEstimator, SSRTTransformer
from .imagecore import GrayImage, NormalizedImage, load_image, save_image
from .inertia import AxisEstimate, hessian_check, moments_axis, select_sigma, ssrt_argmax
from .moments import MomentSet, Orientation, compute_moments, orientation_phi
from .symmetry import SymmetryParams, SymmetryReport, check_central_symmetry
from .transforms import Sinogram, SinogramGrid, radon, ssrt, ssrt_direct, ssrt_from_radon
from .validation import EmptyObjectError, IsotropicObjectError, ValidationError

__all__ = [
    "__version__",
    "CentralSymmetryClassifier",
    "InertiaAxisEstimator",
    "SSRTTransformer",
    "GrayImage",
    "NormalizedImage",
    "load_image",
    "save_image",
    "AxisEstimate",
    "hessian_check",
    "moments_axis",
    "select_sigma",
    "ssrt_argmax",
    "MomentSet",
    "Orientation",
    "compute_moments",
    "orientation_phi",
    "SymmetryParams",
    "SymmetryReport",
    "check_central_symmetry",
    "Sinogram",
    "SinogramGrid",
    "radon",
    "ssrt",
    "ssrt_direct",
    "ssrt_from_radon",
    "EmptyObjectError",
    "IsotropicObjectError",
    "ValidationError",
]
