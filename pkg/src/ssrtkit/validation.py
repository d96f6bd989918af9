"""Input validation helpers shared by the functional API and the estimators."""

import numbers

import numpy as np


class ValidationError(ValueError):
    """An input or parameter violates a documented precondition."""


class EmptyObjectError(ValidationError):
    """Raised when an image has no foreground mass to work with."""

    def __init__(self, message="empty object"):
        super().__init__(message)


class IsotropicObjectError(ValidationError):
    """Raised when second-order moments do not define a principal axis."""


def check_array_2d(pixels, name="image"):
    """Return ``pixels`` as a C-contiguous float64 2-D array.

    Raises
    ------
    ValueError
        If the array is not 2-D, has a zero dimension, or holds
        non-finite values.
    """
    arr = np.asarray(pixels, dtype=np.float64)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(f"{name} has a zero dimension: {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return np.ascontiguousarray(arr)


def check_unit_range(arr, name="image"):
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValidationError(f"{name} values must lie in [0, 1]")
    return arr


def check_binary(arr, name="image"):
    """Reject anything that is not exactly {0, 1}; no silent thresholding."""
    arr = np.asarray(arr)
    if not np.all((arr == 0) | (arr == 1)):
        raise ValidationError(f"{name} must be binary (pixels in {{0, 1}})")
    return arr


def check_positive(value, name):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)


def check_fraction(value, name, low=0.0, high=1.0):
    if not isinstance(value, numbers.Real) or not (low <= value <= high):
        raise ValidationError(f"{name} must lie in [{low}, {high}], got {value!r}")
    return float(value)


def check_image_stack(X):
    """Normalise estimator input to a list of 2-D float arrays.

    A single 2-D array is one image; a 3-D array or a sequence is a batch.
    Returns ``(images, single)`` where ``single`` records which it was.
    """
    from .imagecore import GrayImage

    if isinstance(X, GrayImage):
        return [X.pixels], True
    if isinstance(X, np.ndarray):
        if X.ndim == 2:
            return [check_array_2d(X)], True
        if X.ndim == 3:
            return [check_array_2d(x) for x in X], False
        raise ValidationError(f"expected a 2-D image or a 3-D stack, got shape {X.shape}")
    images = []
    for x in X:
        images.append(x.pixels if isinstance(x, GrayImage) else check_array_2d(x))
    if not images:
        raise ValidationError("empty image batch")
    return images, False
