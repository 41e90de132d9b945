"""Annular domains and the two field representations used throughout.

A :class:`RadialProfile` is a function of ``r`` alone, either closed-form
(with analytic derivatives) or sampled on a uniform grid.  A
:class:`MeridianField` holds an axisymmetric function of ``n`` variables on
the polar half-plane ``(r, theta)``, ``theta`` measured from the x1-axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class AnnulusDomain:
    """The ring ``r_in < |x| < r_out`` in ``R^n``.

    For ``n == 1`` the "annulus" is treated as the interval ``[r_in, r_out]``
    with ``r`` the coordinate, so ``r_in = 0`` is allowed there.
    """

    n: int
    r_in: float = 1.0
    r_out: float = 2.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.n}")
        lower_ok = self.r_in >= 0 if self.n == 1 else self.r_in > 0
        if not (lower_ok and self.r_in < self.r_out):
            raise ValueError(f"need 0 < r_in < r_out, got ({self.r_in}, {self.r_out})")

    @property
    def width(self) -> float:
        return self.r_out - self.r_in

    def radial_grid(self, num: int) -> np.ndarray:
        return np.linspace(self.r_in, self.r_out, num)


def radial_laplacian(u, du, d2u, r, n):
    """``u'' + (n-1) u'/r``; ``u`` is unused but kept for call symmetry."""
    r = np.asarray(r, dtype=float)
    if n == 1:
        return np.asarray(d2u, dtype=float)
    return d2u + (n - 1) * du / r


class RadialProfile:
    """Scalar function of ``r`` on ``[domain.r_in, domain.r_out]``.

    Build with closed-form callables (``func``, ``deriv``, ``deriv2``) or
    with :meth:`from_samples`.  Sampled profiles interpolate linearly and
    differentiate with second-order centered differences (one-sided at the
    ends).
    """

    def __init__(self, domain: AnnulusDomain, func: Callable | None = None,
                 deriv: Callable | None = None, deriv2: Callable | None = None,
                 r: np.ndarray | None = None, values: np.ndarray | None = None,
                 name: str = ""):
        if (func is None) == (values is None):
            raise ValueError("give exactly one of func or sampled values")
        self.domain = domain
        self.name = name
        self._func, self._deriv, self._deriv2 = func, deriv, deriv2
        if values is not None:
            r = np.asarray(r, dtype=float)
            values = np.asarray(values, dtype=float)
            if r.shape != values.shape or r.ndim != 1 or r.size < 3:
                raise ValueError("sampled profile needs matching 1-D r and values")
            steps = np.diff(r)
            if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps.mean():
                raise ValueError("sample grid must be uniform and increasing")
            self.r = r
            self.values = values
            self.h_r = float(steps.mean())
            self._d1 = np.gradient(values, self.h_r, edge_order=2)
            self._d2 = np.gradient(self._d1, self.h_r, edge_order=2)
            self._d2[1:-1] = (values[2:] - 2 * values[1:-1] + values[:-2]) / self.h_r ** 2
        else:
            self.r = None
            self.values = None
            self.h_r = None

    @classmethod
    def from_samples(cls, domain, r, values, name=""):
        return cls(domain, r=r, values=values, name=name)

    @property
    def is_sampled(self) -> bool:
        return self.values is not None

    @property
    def n(self) -> int:
        return self.domain.n

    def __call__(self, r):
        if self.is_sampled:
            return np.interp(r, self.r, self.values)
        return self._func(np.asarray(r, dtype=float))

    def derivative(self, r, order: int = 1):
        if order == 0:
            return self(r)
        if order not in (1, 2):
            raise ValueError("only first and second derivatives are available")
        if self.is_sampled:
            table = self._d1 if order == 1 else self._d2
            return np.interp(r, self.r, table)
        fn = self._deriv if order == 1 else self._deriv2
        if fn is None:
            return self._fd_derivative(np.asarray(r, dtype=float), order)
        return fn(np.asarray(r, dtype=float))

    def _fd_derivative(self, r, order, step=1e-4):
        # centered, clipped to stay inside the closed interval
        lo, hi = self.domain.r_in, self.domain.r_out
        c = np.clip(r, lo + step, hi - step)
        f = self._func
        if order == 1:
            return (f(c + step) - f(c - step)) / (2 * step)
        return (f(c + step) - 2 * f(c) + f(c - step)) / step ** 2

    def laplacian(self, r):
        """Radial Laplacian ``u'' + (n-1)u'/r`` in dimension ``domain.n``."""
        return radial_laplacian(None, self.derivative(r, 1), self.derivative(r, 2),
                                r, self.n)

    def sample(self, num: int) -> np.ndarray:
        return self(self.domain.radial_grid(num))

    def resample(self, num: int) -> "RadialProfile":
        r = self.domain.radial_grid(num)
        return RadialProfile.from_samples(self.domain, r, self(r), name=self.name)


def theta_grid(num: int) -> np.ndarray:
    """Nodes ``0, ..., pi`` with both axis directions included."""
    return np.linspace(0.0, np.pi, num)


class MeridianField:
    """Axisymmetric field on the closed half-annulus, stored on an (r, theta) grid.

    ``values[i, j]`` is the field at radius ``r[i]`` and polar angle
    ``theta[j]`` from the positive x1-axis.  The n-dimensional function is
    recovered by revolving about the x1-axis, so the Laplacian carries the
    ``(n - 2) cot(theta)`` term.  ``func``, when given, evaluates the exact
    field at meridian coordinates ``(z, rho)``.
    """

    def __init__(self, domain: AnnulusDomain, r, theta, values, func=None, name=""):
        if domain.n < 2:
            raise ValueError("meridian fields need n >= 2")
        self.domain = domain
        self.r = np.asarray(r, dtype=float)
        self.theta = np.asarray(theta, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (self.r.size, self.theta.size):
            raise ValueError("values must have shape (len(r), len(theta))")
        self.func = func
        self.name = name

    @property
    def n(self) -> int:
        return self.domain.n

    @property
    def symmetry_exponent(self) -> int:
        return self.n - 2

    @classmethod
    def from_function(cls, domain, func, nr, ntheta, name=""):
        """Sample ``func(z, rho)`` on a polar grid with ``nr x ntheta`` nodes."""
        r = domain.radial_grid(nr)
        theta = theta_grid(ntheta)
        R, T = np.meshgrid(r, theta, indexing="ij")
        return cls(domain, r, theta, func(R * np.cos(T), R * np.sin(T)), func=func, name=name)

    @classmethod
    def from_radial(cls, profile: RadialProfile, nr, ntheta, name=""):
        r = profile.domain.radial_grid(nr)
        theta = theta_grid(ntheta)
        vals = np.repeat(profile(r)[:, None], ntheta, axis=1)

        def func(z, rho):
            return profile(np.hypot(z, rho))

        return cls(profile.domain, r, theta, vals, func=func, name=name or profile.name)

    def with_values(self, values, name=None):
        return MeridianField(self.domain, self.r, self.theta, values, func=None,
                             name=self.name if name is None else name)

    def __call__(self, z, rho):
        """Bilinear interpolation in (r, theta); exact ``func`` is not used here."""
        return interp_polar(self.r, self.theta, self.values, z, rho)

    def exact(self, z, rho):
        if self.func is None:
            return self(z, rho)
        return self.func(np.asarray(z, dtype=float), np.asarray(rho, dtype=float))


def interp_polar(r, theta, values, z, rho):
    """Bilinear interpolation of grid ``values`` at meridian points ``(z, rho)``.

    Points inside ``r[0]`` clamp to the inner boundary row and points beyond
    ``r[-1]`` clamp to the outer row.
    """
    z = np.asarray(z, dtype=float)
    rho = np.abs(np.asarray(rho, dtype=float))
    rr = np.hypot(z, rho)
    tt = np.arctan2(rho, z)
    hr = r[1] - r[0]
    ht = theta[1] - theta[0]
    fi = np.clip((rr - r[0]) / hr, 0.0, r.size - 1.0)
    fj = np.clip((tt - theta[0]) / ht, 0.0, theta.size - 1.0)
    i = np.minimum(fi.astype(int), r.size - 2)
    j = np.minimum(fj.astype(int), theta.size - 2)
    a = fi - i
    b = fj - j
    v = values
    return ((1 - a) * (1 - b) * v[i, j] + a * (1 - b) * v[i + 1, j]
            + (1 - a) * b * v[i, j + 1] + a * b * v[i + 1, j + 1])
