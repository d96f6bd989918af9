import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssrtkit.inertia import (
    axis_from_maximum,
    compare_axes,
    convex_hull,
    diameter,
    hessian_check,
    maximum_regions,
    moments_axis,
    select_sigma,
    ssrt_argmax,
)
from ssrtkit.shapes import disk, ellipse, rectangle
from ssrtkit.transforms import Sinogram, SinogramGrid, ssrt, ssrt_direct
from ssrtkit.validation import EmptyObjectError, IsotropicObjectError, ValidationError

points = st.lists(st.tuples(st.integers(-30, 30), st.integers(-30, 30)), min_size=1, max_size=60)


def brute_diameter(pts):
    return max((math.dist(a, b) for a, b in itertools.combinations(pts, 2)), default=0.0)


# -- sigma -----------------------------------------------------------------------

def test_sigma_two_pixels():
    img = np.zeros((20, 20))
    img[2, 1] = img[2, 18] = 1.0
    assert select_sigma(img) == 17.0


def test_sigma_grayscale():
    assert select_sigma(np.full((100, 200), 0.5), "grayscale") == pytest.approx(223.6068, abs=1e-4)


def test_sigma_blob_brute_force():
    gen = np.random.default_rng(7)
    pts = gen.integers(0, 40, size=(50, 2))
    img = np.zeros((40, 40))
    img[pts[:, 1], pts[:, 0]] = 1.0
    uniq = {tuple(p) for p in pts.tolist()}
    assert select_sigma(img) == pytest.approx(brute_diameter(list(uniq)), abs=1e-12)


@given(points)
def test_diameter_matches_brute_force(pts):
    assert diameter(pts) == pytest.approx(brute_diameter(list(set(pts))), abs=1e-9)


def test_hull_collinear():
    hull = convex_hull([(0, 0), (1, 1), (2, 2), (3, 3)])
    assert len(hull) == 2
    assert diameter([(0, 0), (1, 1), (2, 2), (3, 3)]) == pytest.approx(math.sqrt(18))


def test_sigma_errors():
    with pytest.raises(EmptyObjectError):
        select_sigma(np.zeros((5, 5)))
    with pytest.raises(ValidationError):
        select_sigma(np.full((5, 5), 0.5))
    with pytest.raises(ValidationError):
        select_sigma(np.ones((5, 5)), "other")


# -- argmax ----------------------------------------------------------------------------

def test_argmax_disk_centered():
    s = ssrt(disk((41, 41), 12), select_sigma(disk((41, 41), 12)))
    _, rho = ssrt_argmax(s)
    assert abs(rho) <= 0.5


def test_argmax_horizontal_bar():
    img = rectangle((41, 41), 30, 3, 0.0)
    s = ssrt_direct(img, select_sigma(img))
    theta, rho = ssrt_argmax(s, refine=False)
    assert abs(math.degrees(theta) - 90) <= 1 and abs(rho) <= 0.5


def test_argmax_point_tie_break():
    img = np.zeros((21, 21))
    img[10 + 3, 10 + 4] = 1.0
    s = ssrt_direct(img, 2.0, SinogramGrid.for_shape(img.shape, rho_step=1.0))
    theta, rho = ssrt_argmax(s, refine=False)
    # the peak value is reached at every theta where x cos + y sin hits a bin;
    # lexicographic order picks the smallest theta index among them
    peak = s.values.max()
    j_first = int(np.flatnonzero(np.isclose(s.values.max(axis=0), peak, rtol=0, atol=0))[0])
    assert theta == s.grid.theta_values[j_first]
    assert rho == pytest.approx(4 * math.cos(theta) + 3 * math.sin(theta), abs=0.5)


def test_argmax_rejects_radon():
    from ssrtkit.transforms import radon

    with pytest.raises(ValidationError):
        ssrt_argmax(radon(np.ones((3, 3))))


# -- axes ------------------------------------------------------------------------------

def test_axis_from_maximum():
    a = axis_from_maximum(math.pi / 2, 0.0)
    assert a.phi_star == 0.0 and a.source == "ssrt"
    b = axis_from_maximum(0.0, 5.0)
    assert b.phi_star == pytest.approx(math.pi / 2) and b.anchor == (5.0, 0.0)


@given(st.floats(0, math.pi - 1e-9), st.floats(-50, 50))
def test_anchor_on_line(theta, rho):
    a = axis_from_maximum(theta, rho)
    assert a.anchor[0] * math.cos(a.theta_hat) + a.anchor[1] * math.sin(a.theta_hat) == \
        pytest.approx(a.rho_hat, abs=1e-9)
    assert math.fmod(a.phi_star - (a.theta_hat - math.pi / 2), math.pi) == pytest.approx(0, abs=1e-12)


def test_moments_axis_centered_and_shifted():
    a = moments_axis(rectangle((64, 64), 40, 10, 0.0))
    assert a.phi_star == pytest.approx(0, abs=1e-12) and a.rho_hat == pytest.approx(0, abs=1e-9)
    b = moments_axis(rectangle((64, 64), 40, 10, 0.0, (10, 5)))
    assert b.anchor == pytest.approx((10, 5)) and b.rho_hat == pytest.approx(5, abs=1e-9)


def test_moments_axis_ellipse_40():
    a = moments_axis(ellipse((96, 96), 60, 24, math.radians(40)))
    assert math.degrees(a.phi_star) == pytest.approx(40, abs=0.5)


def test_moments_axis_isotropic():
    with pytest.raises(IsotropicObjectError):
        moments_axis(disk((21, 21), 6))


def test_compare_axes():
    a = axis_from_maximum(0.3, 2.0)
    d = compare_axes(a, a, a.anchor)
    assert d.angle_diff == 0.0 and d.centroid_distance == pytest.approx(0, abs=1e-12)
    b = axis_from_maximum(0.3 + math.pi / 2, 0.0)
    assert compare_axes(a, b, (0, 0)).angle_diff == pytest.approx(math.pi / 2)


def test_rectangle_25_axis_match():
    img = rectangle((96, 96), 60, 20, math.radians(25), (4, -2))
    sino = ssrt(img, select_sigma(img))
    axis = axis_from_maximum(*ssrt_argmax(sino))
    ref = moments_axis(img)
    d = compare_axes(axis, ref, ref.anchor)
    assert d.angle_diff <= math.radians(1) and d.centroid_distance <= 1.0


@pytest.mark.parametrize("deg", [0, 35, 90, 150])
def test_rotation_covariance_of_theta(deg):
    img = ellipse((96, 96), 60, 20, math.radians(deg))
    theta, _ = ssrt_argmax(ssrt(img, select_sigma(img)))
    expected = math.radians(deg) + math.pi / 2
    assert math.degrees(abs(math.remainder(theta - expected, math.pi))) <= 1.0


# -- maximum conditions -------------------------------------------------------------------

@pytest.fixture(scope="module")
def bar_check():
    img = rectangle((64, 64), 40, 12, math.radians(20), (3, 2))
    sigma = select_sigma(img)
    theta, rho = ssrt_argmax(ssrt(img, sigma))
    return hessian_check(img, sigma, theta, rho), sigma


def test_hessian_maximum(bar_check):
    h, _ = bar_check
    assert h.h11 < 0 and h.det > 0 and h.is_maximum


def test_hessian_mixed_partials_agree(bar_check):
    h, _ = bar_check
    scale = max(abs(h.h11), abs(h.h22), abs(h.h12))
    assert abs(h.h12 - h.h21) <= 1e-6 * scale


def test_hessian_h22_scaled(bar_check):
    h, sigma = bar_check
    target = -2 / (math.sqrt(2 * math.pi) * sigma)
    assert abs(h.h22_scaled - target) <= 0.1 * abs(target)


def test_hessian_boundary_error():
    with pytest.raises(ValidationError):
        hessian_check(np.ones((5, 5)), 3.0, 0.0, 2.5)


def test_single_maximum_region():
    img = rectangle((64, 64), 40, 12, math.radians(70))
    assert maximum_regions(ssrt(img, select_sigma(img))) == 1


def test_maximum_regions_wrap_merge():
    g = SinogramGrid.create(5.0, math.radians(10))
    v = np.zeros((g.n_rho, g.n_theta))
    c = g.center_index
    v[c + 2, 0] = 1.0
    v[c - 2, -1] = 1.0  # same ridge seen through S(rho, theta + pi) = S(-rho, theta)
    assert maximum_regions(Sinogram(g, v, "ssrt", 1.0)) == 1
    v[c, 9] = 1.0
    assert maximum_regions(Sinogram(g, v, "ssrt", 1.0)) == 2
