import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ssrtkit.imagecore import add_impulse_noise, em_measure, rotate_pi_about_centroid
from ssrtkit.moments import compute_moments
from ssrtkit.shapes import cross, ellipse, rectangle, regular_polygon
from ssrtkit.symmetry import (
    SHIFT_MODES,
    SymmetryParams,
    _column,
    check_central_symmetry,
    difference_measure,
    reflect_projection,
    shift_projection,
)
from ssrtkit.transforms import SinogramGrid, radon, ssrt
from ssrtkit.validation import EmptyObjectError, ValidationError


def double_bar(center=(0.0, 0.0), size=64):
    cx, cy = center
    a = rectangle((size, size), 24, 4, 0.4, (cx + 6 * math.sin(0.4), cy - 6 * math.cos(0.4)))
    b = rectangle((size, size), 24, 4, 0.4, (cx - 6 * math.sin(0.4), cy + 6 * math.cos(0.4)))
    return np.maximum(a, b)


def oracle_symmetric(img, t=0.1):
    m = compute_moments(img)
    return em_measure(img, rotate_pi_about_centroid(img, m.centroid), t)[1]


# -- params ------------------------------------------------------------------------

def test_params_defaults_and_validation():
    p = SymmetryParams()
    assert (p.epsilon, p.sigma_sym, p.m_percent) == (0.03, 1.0, 10.0)
    assert math.degrees(p.delta_theta) == pytest.approx(5.0)
    assert SymmetryParams.noisy().sigma_sym == 10.0
    assert SymmetryParams.noisy(sigma_sym=4.0).sigma_sym == 4.0
    for bad in (dict(epsilon=0), dict(sigma_sym=-1), dict(m_percent=0), dict(m_percent=101)):
        with pytest.raises(ValidationError):
            SymmetryParams(**bad)


# -- building blocks -------------------------------------------------------------------

def test_reflect():
    even = np.array([1.0, 2.0, 3.0, 2.0, 1.0])
    np.testing.assert_array_equal(reflect_projection(even), even)
    delta = np.zeros(9)
    delta[4 + 3] = 1.0
    out = reflect_projection(delta)
    assert out[4 - 3] == 1.0 and out.sum() == 1.0


@given(arrays(np.float64, st.integers(1, 30), elements=st.floats(-5, 5)))
def test_reflect_involution(p):
    np.testing.assert_array_equal(reflect_projection(reflect_projection(p)), p)


def test_shift():
    p = np.arange(11.0)
    np.testing.assert_array_equal(shift_projection(p, 0.0), p)
    np.testing.assert_array_equal(shift_projection(p, 2.4), np.roll(p, 2))
    np.testing.assert_array_equal(shift_projection(p, 2.0, rho_step=0.5), np.roll(p, 4))
    np.testing.assert_allclose(shift_projection(p, 0.5, subpixel=True)[3:8],
                               [2.5, 3.5, 4.5, 5.5, 6.5])
    with pytest.raises(ValidationError):
        shift_projection(p, 11.0)


def test_shift_for_centroid_at_theta_zero():
    # rho of the centroid at theta = 0 is x_c, so the required shift is -x_c
    img = rectangle((64, 64), 20, 6, 0.0, (10, 5))
    g = SinogramGrid.for_shape(img.shape)
    col = radon(img, g).values[:, 0]
    centred = shift_projection(col, -10.0)
    c = g.center_index
    assert np.dot(centred, g.rho_values) == pytest.approx(0, abs=1e-9)
    assert centred[c] == col[c + 10]


def test_shift_recovers_centred_projection():
    sigma = 1.0
    g = SinogramGrid.for_shape((64, 64), margin=12)
    base = ssrt(rectangle((64, 64), 30, 8, 0.7), sigma, g)
    moved = ssrt(rectangle((64, 64), 30, 8, 0.7, (6, -9)), sigma, g)
    for j in range(0, g.n_theta, 15):
        th = g.theta_values[j]
        back = shift_projection(moved.values[:, j], -(6 * math.cos(th) - 9 * math.sin(th)))
        # bin rounding leaves at most half a bin of offset: compare to the
        # largest one-bin change of the reference column
        slope = np.max(np.abs(np.diff(base.values[:, j])))
        assert np.max(np.abs(back - base.values[:, j])) <= slope + 1e-12


def test_difference_measure_examples():
    p = np.linspace(0, 1, 100)
    assert difference_measure(p, p, 10) == 0.0
    q = p.copy()
    q[17] += 0.5
    assert difference_measure(p, q, 10) == pytest.approx(0.05, abs=1e-15)
    with pytest.raises(ValidationError):
        difference_measure(np.zeros(5), np.zeros(5))
    with pytest.raises(ValidationError):
        difference_measure(np.ones(5), np.ones(4))


@given(arrays(np.float64, 40, elements=st.floats(0, 1)),
       arrays(np.float64, 40, elements=st.floats(0, 1)),
       st.floats(1e-3, 1e3), st.floats(1, 100))
def test_difference_measure_scale_invariant(p, q, c, m):
    if p.max() <= 0:
        return
    assert difference_measure(c * p, c * q, m) == pytest.approx(difference_measure(p, q, m),
                                                                rel=1e-12, abs=1e-12)


def test_column_wrap_is_reflection():
    img = rectangle((40, 40), 24, 6, 0.3, (3, -2))
    s = ssrt(img, 1.0)
    a, ua = _column(s, 0.5)
    b, ub = _column(s, 0.5 + math.pi)
    np.testing.assert_array_equal(a, b[::-1])
    assert ub == pytest.approx(ua + math.pi)
    # the last grid angle rounds up to pi: taken from column 0, reflected
    c, uc = _column(s, math.pi - 1e-4)
    np.testing.assert_array_equal(c, s.values[::-1, 0])
    assert uc == pytest.approx(math.pi)


# -- classification -----------------------------------------------------------------------

def test_cross_symmetric():
    img = cross((64, 64), 44, 8)
    assert oracle_symmetric(img)
    r = check_central_symmetry(img)
    assert r.sym and len(r.d_values) == 3


def test_triangle_not_symmetric():
    img = regular_polygon((64, 64), 3, 22)
    assert not oracle_symmetric(img)
    assert not check_central_symmetry(img).sym


def test_off_center_double_bar():
    img = double_bar((9.5, -6.0))
    assert oracle_symmetric(img)
    assert check_central_symmetry(img).sym


@pytest.mark.parametrize("img", [
    cross((64, 64), 40, 6, 0.2),
    rectangle((64, 64), 40, 10, 1.0),
    ellipse((65, 65), 44, 16, 2.0),
    double_bar(),
], ids=["cross", "rect", "ellipse", "double_bar"])
@pytest.mark.parametrize("mode", SHIFT_MODES)
def test_centred_symmetric_rasters_small_d(img, mode):
    np.testing.assert_array_equal(img, img[::-1, ::-1])
    r = check_central_symmetry(img, shift_mode=mode, short_circuit=False)
    assert max(r.d_values) <= 0.01 and r.sym


@pytest.mark.parametrize("shift", [(0, 0), (5, 0), (0, -7), (6, 4), (-3, 8)])
@pytest.mark.parametrize("make, expected", [
    (lambda c: cross((72, 72), 40, 8, 0.3, c), True),
    (lambda c: double_bar(c, 72), True),
    (lambda c: regular_polygon((72, 72), 3, 18, 0.2, c), False),
    (lambda c: np.maximum(rectangle((72, 72), 28, 4, 0, (c[0], c[1] - 6)),
                          rectangle((72, 72), 28, 4, math.pi / 2, (c[0] - 12, c[1] + 6))), False),
], ids=["cross", "double_bar", "triangle", "L"])
def test_translation_invariance(shift, make, expected):
    img = make(tuple(float(v) for v in shift))
    assert check_central_symmetry(img).sym is expected


@pytest.mark.parametrize("seed", range(6))
def test_short_circuit_consistency(seed):
    gen = np.random.default_rng(seed)
    img = np.zeros((48, 48))
    for _ in range(gen.integers(1, 4)):
        img = np.maximum(img, rectangle((48, 48), gen.uniform(10, 30), gen.uniform(1, 6),
                                        gen.uniform(0, math.pi),
                                        tuple(gen.uniform(-10, 10, 2))))
    full = check_central_symmetry(img, short_circuit=False)
    short = check_central_symmetry(img)
    assert full.sym == short.sym
    assert short.d_values == full.d_values[:len(short.d_values)]
    if not short.sym:
        assert short.d_values[-1] > short.params.epsilon
        assert all(d <= short.params.epsilon for d in short.d_values[:-1])


def test_wrap_representative_invariance():
    img = np.maximum(rectangle((64, 64), 30, 4, 0.2, (2, -3)), cross((64, 64), 20, 4, 0.2, (2, -3)))
    tri = regular_polygon((64, 64), 3, 18, 0.4)
    for im in (img, tri):
        a = check_central_symmetry(im, SymmetryParams(delta_theta=math.radians(5)),
                                   short_circuit=False)
        b = check_central_symmetry(im, SymmetryParams(delta_theta=math.radians(185)),
                                   short_circuit=False)
        assert a.sym == b.sym
        np.testing.assert_allclose(a.d_values, b.d_values, atol=1e-12)


def test_exact_angles_agree_with_grid():
    img = double_bar((4.5, 3.0))
    a = check_central_symmetry(img, short_circuit=False)
    b = check_central_symmetry(img, exact_angles=True, short_circuit=False)
    assert a.sym and b.sym
    assert max(b.d_values) <= 0.01


def test_epsilon_monotone():
    img = regular_polygon((64, 64), 5, 20)
    d = max(check_central_symmetry(img, short_circuit=False).d_values)
    assert not check_central_symmetry(img, SymmetryParams(epsilon=0.5 * d)).sym
    assert check_central_symmetry(img, SymmetryParams(epsilon=1.01 * d)).sym


def test_report_dict_and_shift_amounts():
    r = check_central_symmetry(double_bar((5.0, 2.0)))
    d = r.to_dict()
    assert d["sym"] is True and len(d["d_values"]) == 3
    assert d["xc"] == pytest.approx(5.0, abs=1e-9)
    for m, entry in zip(r.measures, d["d_values"]):
        expected = -(5.0 * math.cos(m.theta_used) + 2.0 * math.sin(m.theta_used))
        assert entry["shift_px"] == pytest.approx(expected, abs=1e-6)
    assert d["params"]["delta_theta_deg"] == pytest.approx(5.0)


def test_errors():
    with pytest.raises(EmptyObjectError):
        check_central_symmetry(np.zeros((16, 16)))
    with pytest.raises(ValidationError):
        check_central_symmetry(np.full((16, 16), 0.5))
    with pytest.raises(ValidationError):
        check_central_symmetry(cross((32, 32), 20, 4), shift_mode="nearest")


def test_isotropic_object_uses_argmax():
    img = np.zeros((32, 32))
    img[8:24, 8:24] = 1.0
    assert check_central_symmetry(img).sym


def test_noisy_params_help():
    img = cross((64, 64), 0.7 * 64, 12, math.radians(30))
    noisy = add_impulse_noise(img, 0.1, 0).pixels
    assert not check_central_symmetry(noisy).sym
    assert check_central_symmetry(noisy, SymmetryParams.noisy()).sym
