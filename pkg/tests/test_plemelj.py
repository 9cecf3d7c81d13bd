import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leviflat.errors import DomainError, NearSingularityError
from leviflat.geometry import CutoffWindow, make_circle, make_segment
from leviflat.plemelj import (BoundaryFunction, Extension, cauchy_transform, extension_classify,
                              jump_residual, morera_loop_integral, plemelj_boundary_values)

from oracles import extrapolated_side, laurent_lstsq_verdict, random_trig_poly

GOLDEN = (math.sqrt(5) - 1) / 2
TEST_PARAMS = 2 * math.pi * (np.arange(32) + GOLDEN) / 32


def circle_fn(n, rule):
    c = make_circle(1.0, n)
    return c, BoundaryFunction.from_rule(c, rule)


def test_cauchy_transform_examples():
    c, f = circle_fn(256, lambda z: z ** 2)
    assert cauchy_transform(c, None, f, 0.3) == pytest.approx(0.09, abs=1e-14)
    assert cauchy_transform(c, None, f, 2.0) == pytest.approx(0, abs=1e-14)
    c, f = circle_fn(256, lambda z: 1 / z)
    # 1/(zeta(zeta - z)) = (1/z)(1/(zeta - z) - 1/zeta): value -1/z outside
    assert cauchy_transform(c, None, f, 2.0) == pytest.approx(-0.5, abs=1e-14)
    assert cauchy_transform(c, None, f, 0.4 + 0.2j) == pytest.approx(0, abs=1e-13)
    seg = make_segment(-1, 1, 64)
    zero = BoundaryFunction(np.zeros(64, dtype=complex))
    assert cauchy_transform(seg, CutoffWindow(0, 0.3, 0.6), zero, 0.5j) == 0


def test_cauchy_transform_near_curve_rejected():
    c, f = circle_fn(64, lambda z: z)
    with pytest.raises(NearSingularityError, match="plemelj"):
        cauchy_transform(c, None, f, 1.0 + 1e-3)
    with pytest.raises(DomainError):
        cauchy_transform(c, None, BoundaryFunction(np.ones(10)), 0.0)


@pytest.mark.parametrize("deg", range(0, 9))
def test_interior_reproduction_and_exterior_annihilation(deg):
    coeffs = np.random.default_rng(deg).normal(size=deg + 1) + 1j * np.random.default_rng(deg + 50).normal(size=deg + 1)
    p = np.polynomial.Polynomial(coeffs)
    c, f = circle_fn(128, p)
    for z in (0.0, 0.3 - 0.1j, -0.5 + 0.6j, 0.8j):
        assert abs(cauchy_transform(c, None, f, z) - p(z)) <= 1e-10
    for z in (2.0, -2.5j, 3 + 3j, 10.0):
        assert abs(cauchy_transform(c, None, f, z)) <= 1e-10


def test_boundary_values_examples():
    c, f = circle_fn(256, lambda z: z)
    plus, minus = plemelj_boundary_values(c, None, f, 0.0)
    assert plus == pytest.approx(1, abs=1e-12) and minus == pytest.approx(0, abs=1e-12)
    c, f = circle_fn(256, lambda z: 1 / z)
    plus, minus = plemelj_boundary_values(c, None, f, math.pi / 2)
    assert plus == pytest.approx(0, abs=1e-12) and minus == pytest.approx(1j, abs=1e-12)


def test_boundary_values_are_limits_of_the_transform():
    # independent route: radial limits of the off-curve transform of e^zeta
    c, f = circle_fn(1024, np.exp)
    s = 1.234
    z0 = np.exp(1j * s)
    plus, minus = plemelj_boundary_values(c, None, f, s)
    assert plus == pytest.approx(np.exp(z0), abs=1e-12)   # F+ = e^z inside
    assert minus == pytest.approx(0, abs=1e-12)           # F- = 0 outside
    near_in = cauchy_transform(c, None, f, 0.97 * z0)
    assert abs(near_in - np.exp(0.97 * z0)) < 1e-12


def arc_setup(n=8192):
    seg = make_segment(-1, 1, n)
    chi = CutoffWindow(0.0, 0.4, 0.8)
    return seg, chi, BoundaryFunction.from_rule(seg, lambda z: np.ones_like(z))


def richardson_side(seg, chi, f, x, sign, h):
    return extrapolated_side(cauchy_transform, seg, chi, f, x, sign, h)


def test_arc_bump_jump_against_extrapolation_oracle():
    seg, chi, f = arc_setup()
    plus, minus = plemelj_boundary_values(seg, chi, f, 0.0)
    rp = richardson_side(seg, chi, f, 0.0, +1, 0.004)
    rm = richardson_side(seg, chi, f, 0.0, -1, 0.004)
    assert abs((rp - rm) - 1) <= 1e-6
    assert abs(plus - minus - 1) <= 1e-6
    assert abs(plus - rp) <= 1e-6 and abs(minus - rm) <= 1e-6


def test_arc_values_off_centre_match_oracle():
    seg, chi, f = arc_setup()
    for x in (-0.3, 0.17, 0.35):
        plus, minus = plemelj_boundary_values(seg, chi, f, x)
        rp = richardson_side(seg, chi, f, x, +1, 0.004)
        rm = richardson_side(seg, chi, f, x, -1, 0.004)
        assert abs(plus - rp) <= 1e-6 and abs(minus - rm) <= 1e-6


def test_boundary_values_require_plateau():
    seg, chi, f = arc_setup(256)
    with pytest.raises(DomainError, match="plateau"):
        plemelj_boundary_values(seg, chi, f, 0.6)
    with pytest.raises(DomainError):
        plemelj_boundary_values(seg, None, f, 0.0)


def test_jump_residual_zero_density():
    c, f = circle_fn(128, lambda z: np.zeros_like(z))
    rep = jump_residual(c, None, f, TEST_PARAMS)
    assert np.all(rep.jump_residuals == 0) and rep.max_residual == 0


@pytest.mark.parametrize("rule", [lambda z: z ** 2, lambda z: 1 / z, np.exp], ids=["z2", "inv", "exp"])
def test_jump_residual_small_at_4096(rule):
    c, f = circle_fn(4096, rule)
    assert jump_residual(c, None, f, TEST_PARAMS).max_residual <= 1e-8


def test_jump_residual_converges():
    res = {}
    for n in (64, 128):
        c, f = circle_fn(n, np.exp)
        res[n] = jump_residual(c, None, f, TEST_PARAMS).max_residual
    assert res[128] * 10 <= res[64]


@pytest.mark.parametrize("rule", [lambda z: z ** 2, np.exp, lambda z: 1 / (z - 1.7)], ids=["z2", "exp", "pole"])
def test_jump_residual_order_at_least_four(rule):
    r = {}
    for n in (256, 2048):
        c, f = circle_fn(n, rule)
        r[n] = jump_residual(c, None, f, TEST_PARAMS).max_residual
    order = math.log2(r[256] / r[2048]) / 3
    assert order >= 4


def test_jump_report_csv(tmp_path):
    import io
    c, f = circle_fn(64, np.exp)
    rep = jump_residual(c, None, f, TEST_PARAMS[:3])
    buf = io.StringIO()
    rep.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "param,re_plus,im_plus,re_minus,im_minus,residual"
    assert len(lines) == 4 and len(lines[1].split(",")) == 6


def samples_on_circle(n, fn):
    th = 2 * np.pi * np.arange(n) / n
    return fn(th)


def test_extension_classify_golden():
    cases = {
        Extension.INSIDE_ONLY: lambda t: np.exp(1j * t),
        Extension.OUTSIDE_ONLY: lambda t: np.exp(-1j * t),
        Extension.BOTH: lambda t: np.full_like(t, 2.5, dtype=complex),
        Extension.NEITHER: lambda t: 2 * np.cos(t),
    }
    for want, fn in cases.items():
        assert extension_classify(samples_on_circle(128, fn), 1e-9) == want
    assert extension_classify(np.zeros(64), 1e-9) == Extension.BOTH
    assert extension_classify(samples_on_circle(64, lambda t: np.exp(1j * t)), 1e-9).value == "inside_only"


def test_extension_classify_validation():
    with pytest.raises(DomainError):
        extension_classify(np.ones(100), 1e-9)
    with pytest.raises(DomainError):
        extension_classify(np.ones(32), 1e-9)


def test_extension_classify_agrees_with_laurent_oracle():
    rng = np.random.default_rng(7)
    seen = set()
    for _ in range(50):
        f = random_trig_poly(rng, 128)
        verdict = extension_classify(f, 1e-9)
        assert verdict == laurent_lstsq_verdict(f, 1e-9)
        seen.add(verdict)
    assert len(seen) >= 3


def test_morera_examples():
    loop = make_circle(1.0, 256)
    assert morera_loop_integral(lambda c: c * c, loop) <= 1e-12
    assert morera_loop_integral(lambda c: c.conjugate(), loop) == pytest.approx(2 * math.pi, rel=1e-12)
    assert morera_loop_integral(lambda c: 1 / (c - 2), loop) <= 1e-10
    # pole inside is detected: 2 pi i residue
    assert morera_loop_integral(lambda c: 1 / (c - 0.3), loop) == pytest.approx(2 * math.pi, rel=1e-12)


def test_morera_scales_with_radius_squared():
    vals = [morera_loop_integral(lambda c: c.conjugate(), make_circle(r, 256)) for r in (0.5, 1.0, 2.0)]
    assert vals == pytest.approx([2 * math.pi * r * r for r in (0.5, 1.0, 2.0)], rel=1e-12)


def test_morera_rejects_non_finite():
    with pytest.raises(DomainError):
        morera_loop_integral(lambda c: 1 / (c - 1), make_circle(1.0, 16))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_morera_vanishes_for_holomorphic_integrand(r, a, b):
    # parameter-dependent Cauchy transform: holomorphic in c away from the curve
    assert morera_loop_integral(lambda c: np.exp(a * c) * (c + b) ** 3, make_circle(r, 128)) <= 1e-11 * (1 + r) ** 4 * math.exp(abs(a) * r) * (1 + abs(b)) ** 3
