import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heatlab.profiles import AnnulusDomain, MeridianField, RadialProfile, interp_polar
from heatlab.tridiag import solve_tridiagonal, tridiag_matvec


def test_annulus_rejects_bad_radii():
    with pytest.raises(ValueError):
        AnnulusDomain(2, 2.0, 1.0)
    with pytest.raises(ValueError):
        AnnulusDomain(2, 0.0, 1.0)
    with pytest.raises(ValueError):
        AnnulusDomain(0, 1.0, 2.0)
    assert AnnulusDomain(1, 0.0, 1.0).width == 1.0


def test_sampled_derivatives_exact_on_quadratics():
    d = AnnulusDomain(3, 1.0, 2.0)
    r = d.radial_grid(101)
    p = RadialProfile.from_samples(d, r, r ** 2)
    np.testing.assert_allclose(p.derivative(r, 1), 2 * r, atol=1e-11)
    np.testing.assert_allclose(p.derivative(r, 2), 2.0, atol=1e-8)
    # Delta r^2 = 2n in dimension n
    np.testing.assert_allclose(p.laplacian(r), 6.0, atol=1e-8)


def test_closed_form_falls_back_to_differences():
    d = AnnulusDomain(2)
    p = RadialProfile(d, np.sin)
    assert p.derivative(1.5, 1) == pytest.approx(np.cos(1.5), abs=1e-8)
    assert p.derivative(1.5, 2) == pytest.approx(-np.sin(1.5), abs=1e-6)


def test_profile_needs_one_representation():
    d = AnnulusDomain(2)
    with pytest.raises(ValueError):
        RadialProfile(d)
    with pytest.raises(ValueError):
        RadialProfile.from_samples(d, np.array([1.0, 1.1, 1.5]), np.zeros(3))


def test_meridian_from_radial_and_interpolation():
    d = AnnulusDomain(3)
    p = RadialProfile(d, lambda r: 2.0 - r, lambda r: -np.ones_like(r))
    f = MeridianField.from_radial(p, 33, 17)
    assert f.values.shape == (33, 17)
    assert f.symmetry_exponent == 1
    z, rho = np.array([1.2, -1.7]), np.array([0.3, 0.1])
    # linear in r, so bilinear interpolation is exact along r
    np.testing.assert_allclose(f(z, rho), 2 - np.hypot(z, rho), atol=1e-12)
    np.testing.assert_allclose(interp_polar(f.r, f.theta, f.values, z, rho), f(z, rho))
    with pytest.raises(ValueError):
        MeridianField(AnnulusDomain(1, 0.0, 1.0), f.r, f.theta, f.values)


@st.composite
def dominant_system(draw):
    n = draw(st.integers(2, 40))
    fl = st.floats(-1.0, 1.0, allow_nan=False)
    lower = np.array(draw(st.lists(fl, min_size=n, max_size=n)))
    upper = np.array(draw(st.lists(fl, min_size=n, max_size=n)))
    extra = np.array(draw(st.lists(st.floats(0.1, 3.0), min_size=n, max_size=n)))
    diag = np.abs(lower) + np.abs(upper) + extra
    rhs = np.array(draw(st.lists(st.floats(-10, 10), min_size=n, max_size=n)))
    return lower, diag, upper, rhs


@settings(max_examples=60, deadline=None)
@given(dominant_system())
def test_thomas_matches_dense_solve(sys_):
    lower, diag, upper, rhs = sys_
    n = diag.size
    A = np.diag(diag) + np.diag(lower[1:], -1) + np.diag(upper[:-1], 1)
    x = solve_tridiagonal(lower, diag, upper, rhs)
    np.testing.assert_allclose(x, np.linalg.solve(A, rhs), rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(tridiag_matvec(lower, diag, upper, x), rhs, atol=1e-9)
    assert x.shape == (n,)


def test_thomas_batched_rhs():
    rng = np.random.default_rng(0)
    n, m = 17, 5
    lower, upper = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
    diag = 3 + rng.uniform(0, 1, n)
    rhs = rng.normal(size=(m, n))
    X = solve_tridiagonal(lower, diag, upper, rhs)
    for k in range(m):
        np.testing.assert_allclose(X[k], solve_tridiagonal(lower, diag, upper, rhs[k]))
    with pytest.raises(ValueError):
        solve_tridiagonal(lower[:-1], diag, upper, rhs)
