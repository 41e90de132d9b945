import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heatlab.initial_data import (InadmissibleParameters, ODESolveParams, check_admissible,
                                  choose_kappa, choose_R_thm2, combine_u0, ellipsoid_label,
                                  laplacian_lower_bound_check, make_g, make_h, make_ramp_a,
                                  make_u0_thm2, make_u0_twopoint, make_V, make_W, solve_vR,
                                  thm2_lemma_checks, vR_closed_form_n2)
from heatlab.profiles import AnnulusDomain, MeridianField, RadialProfile


@pytest.fixture(scope="module")
def W_small():
    return make_W(2, 1.25, 1.5, 0.05, nr=129, ntheta=129)


# V_rho

def test_V_examples(V54):
    assert float(V54(1.0)) == 1.0
    np.testing.assert_array_equal(V54(np.linspace(1.25, 2, 50)), 0.0)
    assert float(V54(9 / 8)) == pytest.approx(math.exp(-8), rel=1e-14)
    assert float(V54(9 / 8)) == pytest.approx(3.3546e-4, abs=1e-8)


@pytest.mark.parametrize("rho", [1.0, 0.9, 1.6])
def test_V_rejects_rho(rho):
    with pytest.raises(InadmissibleParameters):
        make_V(2, rho)


@pytest.mark.parametrize("n, rho", [(2, 1.25), (5, 1.5), (3, 1.1)])
def test_V_laplacian_lower_bound(n, rho):
    ok, worst = laplacian_lower_bound_check(make_V(n, rho), n, rho, samples=4096)
    assert ok and worst >= -1e-9


def test_V_derivatives_match_differences(V54):
    r = np.linspace(1.01, 1.24, 7)
    h = 1e-6
    np.testing.assert_allclose(V54.derivative(r, 1), (V54(r + h) - V54(r - h)) / (2 * h),
                               rtol=1e-6, atol=1e-12)


# ramp a and W

def test_ramp_examples():
    a = make_ramp_a(1.25, 1.5)
    assert float(a(1.25)) == 0.0 and float(a(1.5)) == 1.0
    assert float(a(1.0)) == 0.0 and float(a(2.0)) == 1.0
    assert float(a(1.375)) == pytest.approx(0.5, abs=1e-12)
    assert float(a.derivative(1.25, 1)) == 0.0
    assert float(a.derivative(1.2501, 1)) < 1e-100
    r = np.linspace(1.26, 1.49, 40)
    assert np.all(a.derivative(r, 1) > 0)
    # the spline of the cumulative sum is monotone up to rounding
    assert np.all(np.diff(a(np.linspace(1, 2, 4001))) >= -1e-15)
    with pytest.raises(InadmissibleParameters):
        make_ramp_a(1.3, 1.3)


def test_ellipsoid_label_inverts_the_family():
    b = lambda R: 1 - 0.2 * (R - 1)
    for R, psi in [(1.2, 0.3), (1.7, 2.0), (1.9, 1.57)]:
        y1 = R / b(R) * math.cos(psi)
        y2 = R * math.sin(psi)
        assert float(ellipsoid_label(y1, y2, b)) == pytest.approx(R, abs=1e-12)


def test_W_radial_inside_r0(W_small):
    f = W_small.field
    inside = f.r <= 1.25
    expected = np.broadcast_to(W_small.V(f.r[inside])[:, None], f.values[inside].shape)
    np.testing.assert_allclose(f.values[inside], expected, atol=1e-12)


def test_W_vanishes_beyond_long_axis(W_small):
    semi = 1.5 / (1 - 0.05)
    assert float(W_small(semi + 1e-3, 0.0)) == 0.0
    assert float(W_small(semi - 0.05, 0.0)) > 0.0


def test_W_level_sets_are_ellipsoids(W_small):
    for R in (1.3, 1.4, 1.45):
        b = W_small.b_at(R)
        psi = np.linspace(0, math.pi, 25)
        z, rho = R / b * np.cos(psi), R * np.sin(psi)
        exact = W_small(z, rho)
        np.testing.assert_allclose(exact, W_small.level(R), rtol=1e-9)
        # the gridded field is off by at most the change of level across one radial cell
        dr = W_small.field.r[1] - W_small.field.r[0]
        spread = W_small.level(R - dr) - W_small.level(R + dr)
        interp = W_small.field(z, rho)
        assert np.abs(interp - W_small.level(R)).max() < spread


def test_W_rejects_containment():
    with pytest.raises(InadmissibleParameters):
        make_W(2, 1.25, 1.5, 0.25, nr=17, ntheta=17)
    with pytest.raises(InadmissibleParameters):
        make_W(1, 1.25, 1.5, 0.05)


def test_W_converges_to_V_as_kappa_vanishes():
    diffs = []
    for kappa in (0.02, 0.01, 0.005):
        bump = make_W(2, 1.25, 1.5, kappa, nr=129, ntheta=129)
        f = bump.field
        diffs.append(np.abs(f.values - bump.V(f.r)[:, None]).max())
    ratios = [diffs[0] / diffs[1], diffs[1] / diffs[2]]
    # first order in kappa, with a curvature term from V that fades as kappa shrinks
    assert all(1.7 < q < 2.3 for q in ratios)
    assert abs(ratios[1] - 2) < abs(ratios[0] - 2)
    assert all(d < 6e-4 * k for d, k in zip(diffs, (0.02, 0.01, 0.005)))
    zero = make_W(2, 1.25, 1.5, 0.0, nr=65, ntheta=65)
    expected = np.broadcast_to(zero.V(zero.field.r)[:, None], zero.field.values.shape)
    np.testing.assert_allclose(zero.field.values, expected, atol=1e-13)
    assert check_admissible(zero).passed


def test_choose_kappa_default_start():
    ks = choose_kappa(2, 1.25, 1.5, nr=129, ntheta=129)
    assert 1e-6 < ks.kappa <= 0.05
    assert check_admissible(ks.bump).passed
    assert ks.attempts[0][0] == 0.05


def test_choose_kappa_large_start_keeps_going():
    ks = choose_kappa(2, 1.25, 1.5, nr=65, ntheta=65, start=0.24)
    assert ks.kappa <= 0.24
    assert ks.attempts[-1][1].passed


# combine_u0

def test_combine_examples(V54, W_small):
    V = make_V(2, 1.25)
    f = W_small.field
    np.testing.assert_allclose(combine_u0(0.0, V, W_small).values, V(f.r)[:, None] + 0 * f.values)
    np.testing.assert_allclose(combine_u0(1.0, V, W_small).values, f.values)
    d = AnnulusDomain(2)
    Vc = RadialProfile(d, lambda r: 0.5 + 0 * r)
    Wc = MeridianField(d, f.r, f.theta, np.full(f.values.shape, 0.2))
    assert combine_u0(0.3, Vc, Wc).values[3, 3] == pytest.approx(0.41, abs=1e-15)
    with pytest.raises(InadmissibleParameters):
        combine_u0(1.5, V, W_small)


@settings(max_examples=8, deadline=None)
@given(st.floats(0.0, 1.0))
def test_combination_of_admissible_data_is_admissible(eps):
    V = make_V(2, 1.25)
    W = make_W(2, 1.25, 1.5, 0.05, nr=65, ntheta=65)
    assert check_admissible(V).passed and check_admissible(W).passed
    assert check_admissible(combine_u0(eps, V, W)).passed


# h and v_R

def test_h_examples():
    h = make_h()
    assert float(h(0.5)) == 0.1
    assert float(h(0.0)) == 0.0 and float(h.derivative(0.0, 1)) == 0.0
    assert 0 < float(h(0.125)) < 0.1
    r = np.linspace(0.25, 0.75, 101)
    np.testing.assert_array_equal(h(r), 0.1)
    inner = np.linspace(0.01, 0.99, 197)
    assert np.all(h(inner) <= 0.1) and np.all(h(inner) >= 0)


@pytest.mark.parametrize("end", [0.0, 1.0])
def test_h_flat_contact(end):
    h = make_h()
    step = 1e-2 if end == 0.0 else -1e-2
    vals = h(end + step * np.arange(6))
    diffs = vals.copy()
    for k in range(1, 5):
        diffs = np.diff(diffs)
        assert abs(diffs[0] / abs(step) ** k) < 1e-8


def test_vR_boundary_conditions_and_linear_case():
    zero = RadialProfile(AnnulusDomain(1, 0.0, 1.0), lambda r: 0 * np.asarray(r))
    v = solve_vR(ODESolveParams(4.0, 1, 257), zero)
    np.testing.assert_allclose(v.values, 1 - v.r, atol=1e-14)
    v2 = solve_vR(ODESolveParams(4.0, 2, 257), make_h(), check_tol=1e-6)
    assert v2.values[0] == 1.0 and v2.values[-1] == 0.0


def test_vR_matches_closed_form_n2():
    h = make_h()
    p = ODESolveParams(100.0, 2, 4097)
    v = solve_vR(p, h)
    exact, c1, c2 = vR_closed_form_n2(100.0, h, v.r)
    assert np.abs(exact - v.values).max() < 1e-8
    assert p.c2 == pytest.approx(1 - p.c1 * math.log(100.0), abs=1e-14)
    with pytest.raises(InadmissibleParameters):
        solve_vR(ODESolveParams(0.5, 2), h)


def test_u0_thm2_examples():
    R = 16.0
    u0 = make_u0_thm2(R, 2)
    assert float(u0(R)) == 1.0 and float(u0(R + 1)) == 0.0
    lap = u0.source_laplacian
    assert float(lap(R + 0.5)) == 0.1
    assert float(lap(R)) == 0.0 and float(lap.derivative(R, 1)) == 0.0
    lemma = thm2_lemma_checks(u0)
    assert lemma.passed and lemma.second_derivative_mid >= 0.1


@pytest.mark.parametrize("n", [1, 2])
def test_choose_R(n):
    R, attempts = choose_R_thm2(n)
    assert R <= 2 ** 10
    if n == 1:
        assert R == 16
    u0 = make_u0_thm2(R, n)
    assert float(u0.derivative(R + 0.5, 2)) >= 0.1 - 1e-6


# g and the two-point datum

def test_g_examples():
    w = make_g(0.05, 2)
    assert float(w.g(1.0)) == pytest.approx(10.0)
    assert float(w.g(1.05)) == pytest.approx(10.0)
    assert float(w.g(2.0)) == 0.0
    assert abs(w.residual) < 1e-10
    r = np.linspace(1, 2, 2001)
    assert np.all(np.diff(w.g(r)) <= 1e-15)
    with pytest.raises(InadmissibleParameters):
        make_g(0.3, 2)


@pytest.mark.parametrize("eps, n", [(0.05, 2), (0.1, 3), (0.02, 2)])
def test_g_normalisation(eps, n):
    assert abs(make_g(eps, n).residual) < 1e-10


def test_twopoint_examples(twopoint_u0):
    assert float(twopoint_u0(1.0)) == 1.0
    assert abs(float(twopoint_u0(2.0))) < 1e-10
    assert 0.70 <= float(twopoint_u0(1.025)) <= 0.80
    r = np.linspace(1.0, 1.05, 30)
    np.testing.assert_allclose(twopoint_u0.laplacian(r), 0.0, atol=1e-11)
    assert np.all(twopoint_u0.derivative(np.linspace(1, 2, 200), 1) <= 0)
    assert check_admissible(twopoint_u0).passed


# check_admissible

def test_admissible_V(V54):
    rep = check_admissible(V54)
    assert rep.passed
    assert set(rep.as_dict()) == {"min_laplacian", "laplacian_not_identically_zero",
                                  "max_radial_derivative_of_position", "inner_boundary_error",
                                  "outer_boundary_error", "pass"}


def test_linear_datum_fails_not_identically_zero():
    rep = check_admissible(RadialProfile(AnnulusDomain(1), lambda r: 2 - r,
                                         lambda r: -np.ones_like(r), lambda r: np.zeros_like(r)))
    assert rep.min_laplacian == 0.0
    assert not rep.laplacian_not_identically_zero
    assert not rep.passed


def test_square_datum_depends_on_dimension():
    def make(n):
        return RadialProfile(AnnulusDomain(n), lambda r: (2 - r) ** 2, lambda r: -2 * (2 - r),
                             lambda r: 2 + 0 * r)
    assert check_admissible(make(1)).passed
    rep3 = check_admissible(make(3))
    assert rep3.min_laplacian < 0 and not rep3.passed
    assert rep3.max_radial_derivative_of_position <= 0


def test_sampled_profile_admissibility(V54):
    assert check_admissible(V54.resample(2049)).passed
    bad = V54.resample(257)
    bad.values[0] = 0.9
    assert not check_admissible(RadialProfile.from_samples(bad.domain, bad.r, bad.values)).passed
