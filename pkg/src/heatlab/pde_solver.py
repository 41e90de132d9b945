"""Heat flow ``u_t = Delta u`` on annuli with Dirichlet data 1 (inner) / 0 (outer).

Two geometries are supported:

* radial profiles, ``u = u(r, t)``, stepped by Crank-Nicolson or backward Euler;
* axisymmetric fields on the meridian half-plane, stored on a polar
  ``(r, theta)`` grid and stepped by Peaceman-Rachford ADI (or its
  backward-Euler splitting).

The radial part of the Laplacian is discretised in flux form with fluxes
``(u[i+1] - u[i]) / int_{r_i}^{r_{i+1}} s^{1-n} ds``.  This is second order
and annihilates every radial harmonic function exactly, so the discrete
steady state is the sampled ``u_inf``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .profiles import AnnulusDomain, MeridianField, RadialProfile, interp_polar, theta_grid
from .tridiag import solve_tridiagonal, tridiag_matvec

log = logging.getLogger(__name__)

SCHEMES = ("trapezoidal", "backward")


class SolverError(RuntimeError):
    """Raised when an evolution produces non-finite values."""


@dataclass
class SolverConfig:
    """Time-stepping parameters.

    ``dt=None`` picks the default step: ``h_r`` for radial runs and
    ``min(h_r, r_in * h_theta)`` for meridian runs.  ``startup_steps`` (4 by default)
    backward-Euler steps are taken before switching to ``scheme``;
    ``dt_growth > 1`` lets the step grow geometrically up to ``dt_max``.
    With ``every_step`` each step is stored as a snapshot.
    """

    scheme: str = "trapezoidal"
    dt: float | None = None
    nr: int = 513
    ntheta: int = 513
    t_final: float = 1.0
    snapshots: tuple = ()
    startup_steps: int = 4
    dt_growth: float = 1.0
    dt_max: float | None = None
    every_step: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.t_final <= 0:
            raise ValueError("t_final must be positive")
        if self.dt is not None and not (0 < self.dt <= self.t_final):
            raise ValueError("need 0 < dt <= t_final")
        snaps = tuple(sorted(float(t) for t in self.snapshots))
        if snaps and (snaps[0] < 0 or snaps[-1] > self.t_final * (1 + 1e-12)):
            raise ValueError("snapshot times must lie in [0, t_final]")
        self.snapshots = snaps
        if self.dt_growth < 1:
            raise ValueError("dt_growth must be >= 1")

    def with_(self, **kw) -> "SolverConfig":
        return replace(self, **kw)


# ---------------------------------------------------------------------------
# spatial operators

def _inv_power_integral(a, b, n):
    """``int_a^b s^(1-n) ds``."""
    if n == 1:
        return b - a
    if n == 2:
        return np.log(b / a)
    return (b ** (2 - n) - a ** (2 - n)) / (2 - n)


def radial_operator(r, n):
    """Tridiagonal coefficients of the flux-form radial Laplacian.

    Boundary rows are zero; callers impose Dirichlet data there.
    """
    r = np.asarray(r, dtype=float)
    h = r[1] - r[0]
    G = _inv_power_integral(r[:-1], r[1:], n)
    if n == 1:
        vol = np.full(r.size, h)
    else:
        lo = np.maximum(r - h / 2, 0.0)
        vol = ((r + h / 2) ** n - lo ** n) / n
    lower = np.zeros(r.size)
    upper = np.zeros(r.size)
    lower[1:-1] = 1.0 / (G[:-1] * vol[1:-1])
    upper[1:-1] = 1.0 / (G[1:] * vol[1:-1])
    return lower, -(lower + upper), upper


def _sin_power_cells(theta, p):
    """Integrals of ``sin^p`` over the dual cells around each theta node."""
    ht = theta[1] - theta[0]
    lo = np.clip(theta - ht / 2, 0.0, np.pi)
    hi = np.clip(theta + ht / 2, 0.0, np.pi)
    x, w = np.polynomial.legendre.leggauss(16)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * x[None, :]
    return half * (np.sin(pts) ** p @ w)


def angular_operator(theta, n):
    """Coefficients of ``sin^{2-n} d/dtheta (sin^{n-2} d/dtheta)`` with axis rows.

    Even reflection across both axis directions is built in: the flux
    through ``theta = 0`` and ``theta = pi`` vanishes.
    """
    theta = np.asarray(theta, dtype=float)
    ht = theta[1] - theta[0]
    p = n - 2
    w_half = np.sin(0.5 * (theta[:-1] + theta[1:])) ** p
    vol = _sin_power_cells(theta, p)
    lower = np.zeros(theta.size)
    upper = np.zeros(theta.size)
    lower[1:] = w_half / (ht * vol[1:])
    upper[:-1] = w_half / (ht * vol[:-1])
    return lower, -(lower + upper), upper


class RadialGrid:
    """Uniform radial grid with the discrete Laplacian and its solves."""

    def __init__(self, domain: AnnulusDomain, nr: int):
        if nr < 3:
            raise ValueError("need at least 3 radial nodes")
        self.domain = domain
        self.n = domain.n
        self.r = domain.radial_grid(nr)
        self.h = self.r[1] - self.r[0]
        self.lower, self.diag, self.upper = radial_operator(self.r, self.n)

    def apply(self, u, axis=0):
        return tridiag_matvec(self.lower, self.diag, self.upper, u, axis=axis)

    def implicit(self, c):
        """Diagonals of ``I - c L`` with identity Dirichlet rows."""
        return -c * self.lower, 1.0 - c * self.diag, -c * self.upper


class PolarGrid:
    """``(r, theta)`` grid of the meridian half-annulus."""

    def __init__(self, domain: AnnulusDomain, nr: int, ntheta: int):
        if domain.n < 2:
            raise ValueError("meridian evolution needs n >= 2")
        self.radial = RadialGrid(domain, nr)
        self.domain = domain
        self.n = domain.n
        self.r = self.radial.r
        self.theta = theta_grid(ntheta)
        self.h_theta = self.theta[1] - self.theta[0]
        self.a_lower, self.a_diag, self.a_upper = angular_operator(self.theta, self.n)
        self.inv_r2 = 1.0 / self.r ** 2

    def apply_r(self, u):
        return self.radial.apply(u, axis=0)

    def apply_theta(self, u):
        out = tridiag_matvec(self.a_lower, self.a_diag, self.a_upper, u, axis=1)
        out *= self.inv_r2[:, None]
        out[0] = 0.0
        out[-1] = 0.0
        return out

    def apply(self, u):
        return self.apply_r(u) + self.apply_theta(u)


def discrete_laplacian(values, domain, theta=None):
    """Discrete ``Delta`` of a radial (1-D) or polar (2-D) sample array."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        return RadialGrid(domain, values.size).apply(values)
    return PolarGrid(domain, values.shape[0], values.shape[1]).apply(values)


# ---------------------------------------------------------------------------
# results

@dataclass
class SpaceTimeField:
    """Time-stamped snapshots of one evolution.

    ``values[k]`` is the field at ``times[k]``; radial runs store 1-D rows,
    meridian runs ``(nr, ntheta)`` arrays.  ``u_t`` is the discrete spatial
    operator applied to a snapshot, not a time difference.
    """

    domain: AnnulusDomain
    times: np.ndarray
    values: np.ndarray
    r: np.ndarray
    theta: np.ndarray | None = None
    config: SolverConfig | None = None
    inner_value: float = 1.0
    outer_value: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def kind(self) -> str:
        return "radial" if self.theta is None else "meridian"

    @property
    def n(self) -> int:
        return self.domain.n

    def __len__(self):
        return len(self.times)

    def index(self, t, tol=1e-12):
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[k] - t) > tol * max(1.0, abs(t)):
            raise KeyError(f"no snapshot at t={t}")
        return k

    def _grid(self):
        if self.theta is None:
            return RadialGrid(self.domain, self.r.size)
        return PolarGrid(self.domain, self.r.size, self.theta.size)

    def u_t(self, k):
        """Discrete ``Delta u`` of snapshot ``k`` (zero on the boundary rows)."""
        return self._grid().apply(self.values[k])

    def radial_derivative(self, k):
        """``du/dr`` at the nodes, second-order differences."""
        return np.gradient(self.values[k], self.r, axis=0, edge_order=2)

    def x_dot_grad(self, k):
        """``x . grad u = r du/dr``."""
        dr = self.radial_derivative(k)
        return dr * (self.r if self.theta is None else self.r[:, None])

    def snapshot(self, k):
        if self.theta is None:
            return RadialProfile.from_samples(self.domain, self.r, self.values[k])
        return MeridianField(self.domain, self.r, self.theta, self.values[k])

    def at(self, k, points):
        """Interpolate snapshot ``k`` at points given as radii (radial) or ``(z, rho)``."""
        if self.theta is None:
            return np.interp(points, self.r, self.values[k])
        z, rho = points
        return interp_polar(self.r, self.theta, self.values[k], z, rho)


# ---------------------------------------------------------------------------
# time stepping

def _initial_samples_radial(u0, grid):
    if isinstance(u0, RadialProfile):
        return np.array(u0(grid.r), dtype=float)
    arr = np.asarray(u0, dtype=float)
    if arr.shape != grid.r.shape:
        raise ValueError("initial samples do not match the radial grid")
    return arr.copy()


def _targets(cfg):
    pts = sorted(set(t for t in cfg.snapshots if t > 0) | {cfg.t_final})
    return pts


def _march(u, cfg, dt0, make_stepper, check, callback, store_every):
    """Shared driver: hits snapshot times exactly and records them."""
    targets = _targets(cfg)
    times = [0.0]
    snaps = [u.copy()]
    t = 0.0
    dt = dt0
    steps = 0
    cache = {}
    for target in targets:
        while t < target - 1e-13 * max(1.0, target):
            step = min(dt, target - t)
            if target - (t + step) < 1e-9 * step:
                step = target - t
            scheme = "backward" if steps < cfg.startup_steps else cfg.scheme
            key = (scheme, round(step, 15))
            if key not in cache:
                if len(cache) > 8:
                    cache.clear()
                cache[key] = make_stepper(scheme, step)
            u = cache[key](u)
            t = target if abs(target - (t + step)) < 1e-12 * max(1.0, target) else t + step
            steps += 1
            if not np.all(np.isfinite(u)):
                raise SolverError(f"non-finite values after step {steps} (t={t:.6g})")
            if callback is not None:
                callback(t, u)
            if store_every and t < target:
                times.append(t)
                snaps.append(u.copy())
            if cfg.dt_growth > 1:
                dt = min(dt * cfg.dt_growth, cfg.dt_max or np.inf)
        if store_every or target in cfg.snapshots or target == cfg.t_final:
            times.append(target)
            snaps.append(u.copy())
    check(snaps)
    return np.array(times), np.array(snaps), steps


def evolve_radial(u0, n, cfg: SolverConfig, domain: AnnulusDomain | None = None,
                  inner_value=1.0, outer_value=0.0, callback=None) -> SpaceTimeField:
    """Evolve a radial profile in dimension ``n``.

    Parameters
    ----------
    u0 : RadialProfile or ndarray
        Initial datum; arrays must already live on the ``cfg.nr`` grid.
    n : int
        Space dimension (enters through the ``(n-1)/r`` term).
    cfg : SolverConfig
    domain : AnnulusDomain, optional
        Defaults to ``u0.domain`` (with dimension ``n``).
    callback : callable, optional
        ``callback(t, u)`` after every step.
    """
    if domain is None:
        if not isinstance(u0, RadialProfile):
            raise ValueError("domain is required when u0 is an array")
        d = u0.domain
        domain = AnnulusDomain(n, d.r_in, d.r_out)
    grid = RadialGrid(domain, cfg.nr)
    u = _initial_samples_radial(u0, grid)
    dt0 = cfg.dt if cfg.dt is not None else grid.h

    def make_stepper(scheme, dt):
        c = 0.5 * dt if scheme == "trapezoidal" else dt
        lo, di, up = grid.implicit(c)

        def step(v):
            rhs = v + c * grid.apply(v) if scheme == "trapezoidal" else v.copy()
            rhs[0] = inner_value
            rhs[-1] = outer_value
            return solve_tridiagonal(lo, di, up, rhs)
        return step

    def check(_):
        pass

    times, values, steps = _march(u, cfg, dt0, make_stepper, check, callback, cfg.every_step)
    log.debug("radial evolution: %d steps to t=%g", steps, times[-1])
    return SpaceTimeField(domain, times, values, grid.r, None, cfg, inner_value, outer_value)


def axis_asymmetry(values, h_theta):
    """Largest one-sided theta-derivative at either axis direction."""
    d0 = (-3 * values[:, 0] + 4 * values[:, 1] - values[:, 2]) / (2 * h_theta)
    d1 = (3 * values[:, -1] - 4 * values[:, -2] + values[:, -3]) / (2 * h_theta)
    return float(max(np.abs(d0).max(), np.abs(d1).max()))


def evolve_meridian(u0, n=None, cfg: SolverConfig | None = None, inner_value=1.0,
                    outer_value=0.0, callback=None, symmetry_tol=1e-2) -> SpaceTimeField:
    """Evolve an axisymmetric field in ``R^n`` on the polar meridian grid.

    ``u0`` is a :class:`MeridianField`.  If ``cfg.nr`` / ``cfg.ntheta``
    differ from its grid and it carries an exact ``func``, it is resampled.
    """
    if cfg is None:
        cfg = SolverConfig()
    domain = u0.domain if n is None else AnnulusDomain(n, u0.domain.r_in, u0.domain.r_out)
    if (cfg.nr, cfg.ntheta) != u0.values.shape:
        if u0.func is None:
            raise ValueError("grid mismatch and no exact function to resample from")
        u0 = MeridianField.from_function(domain, u0.func, cfg.nr, cfg.ntheta)
    grid = PolarGrid(domain, cfg.nr, cfg.ntheta)
    u = np.array(u0.values, dtype=float)
    scale = max(1.0, float(np.abs(u).max()))
    if axis_asymmetry(u, grid.h_theta) > symmetry_tol * scale:
        warnings.warn("initial field is not even across the symmetry axis", RuntimeWarning)
    dt0 = cfg.dt if cfg.dt is not None else min(grid.radial.h, domain.r_in * grid.h_theta)
    interior = slice(1, -1)

    def make_stepper(scheme, dt):
        c = 0.5 * dt if scheme == "trapezoidal" else dt
        r_lo, r_di, r_up = grid.radial.implicit(c)
        coef = c * grid.inv_r2[interior, None]
        t_lo = -coef * grid.a_lower[None, :]
        t_di = 1.0 - coef * grid.a_diag[None, :]
        t_up = -coef * grid.a_upper[None, :]

        def step(v):
            if scheme == "trapezoidal":
                rhs = v + c * grid.apply_theta(v)
            else:
                rhs = v.copy()
            rhs[0] = inner_value
            rhs[-1] = outer_value
            half = solve_tridiagonal(r_lo, r_di, r_up, rhs.T).T
            if scheme == "trapezoidal":
                rhs2 = half + c * grid.apply_r(half)
            else:
                rhs2 = half
            out = np.empty_like(v)
            out[0] = inner_value
            out[-1] = outer_value
            out[interior] = solve_tridiagonal(t_lo, t_di, t_up, rhs2[interior])
            return out
        return step

    def check(_):
        pass

    times, values, steps = _march(u, cfg, dt0, make_stepper, check, callback, cfg.every_step)
    log.debug("meridian evolution: %d steps to t=%g", steps, times[-1])
    return SpaceTimeField(domain, times, values, grid.r, grid.theta, cfg, inner_value, outer_value)


# ---------------------------------------------------------------------------
# oracles and convergence

def steady_state(n, r_in=1.0, r_out=2.0) -> RadialProfile:
    """Radial harmonic function equal to 1 at ``r_in`` and 0 at ``r_out``.

    On ``(1, 2)`` this is ``2 - r``, ``1 - log r / log 2`` or
    ``((2/r)^(n-2) - 1) / (2^(n-2) - 1)`` for ``n = 1, 2, > 2``.
    """
    domain = AnnulusDomain(n, r_in, r_out)
    total = _inv_power_integral(r_in, r_out, n)

    def f(r):
        return 1.0 - _inv_power_integral(r_in, np.asarray(r, dtype=float), n) / total

    def df(r):
        return -np.asarray(r, dtype=float) ** (1 - n) / total

    def d2f(r):
        return (n - 1) * np.asarray(r, dtype=float) ** (-n) / total

    return RadialProfile(domain, f, df, d2f, name="u_inf")


def series_oracle_1d(mode_coeffs, t, domain=None) -> RadialProfile:
    """``(1 - x) + sum_k c_k exp(-k^2 pi^2 t) sin(k pi x)`` on ``[0, 1]``."""
    if domain is None:
        domain = AnnulusDomain(1, 0.0, 1.0)
    coeffs = np.asarray(mode_coeffs, dtype=float)
    k = np.arange(1, coeffs.size + 1)
    amp = coeffs * np.exp(-(k * np.pi) ** 2 * t)

    def f(x):
        x = np.asarray(x, dtype=float)
        return (1 - x) + np.sin(np.multiply.outer(x, k * np.pi)) @ amp

    def df(x):
        x = np.asarray(x, dtype=float)
        return -1 + np.cos(np.multiply.outer(x, k * np.pi)) @ (amp * k * np.pi)

    def d2f(x):
        x = np.asarray(x, dtype=float)
        return -np.sin(np.multiply.outer(x, k * np.pi)) @ (amp * (k * np.pi) ** 2)

    return RadialProfile(domain, f, df, d2f, name="series")


@dataclass
class ConvergenceResult:
    grids: list
    errors: list
    orders: list
    monotone: bool
    skipped: bool = False

    @property
    def order(self):
        return self.orders[-1] if self.orders else float("nan")


def observed_orders(errors):
    e = np.asarray(errors, dtype=float)
    return list(np.log2(e[:-1] / e[1:]))


def convergence_study(run, grids, floor=1e-13) -> ConvergenceResult:
    """Sup-norm errors of ``run(N)`` over successively halved grids.

    ``run(N)`` returns the error of the ``N``-node solution.  When every
    error sits at rounding level the order test is skipped.
    """
    errors = [float(run(N)) for N in grids]
    if max(errors) < floor:
        return ConvergenceResult(list(grids), errors, [], True, skipped=True)
    monotone = all(a > b for a, b in zip(errors, errors[1:]))
    if not monotone:
        log.warning("non-monotone errors in convergence study: %s", errors)
    return ConvergenceResult(list(grids), errors, observed_orders(errors), monotone)
