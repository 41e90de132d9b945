"""Oracle-backed evolutions used by the convergence study and the tests."""

from __future__ import annotations

import numpy as np

from .pde_solver import (ConvergenceResult, SolverConfig, convergence_study, evolve_meridian,
                         evolve_radial, series_oracle_1d, steady_state)
from .profiles import AnnulusDomain, MeridianField, RadialProfile

GRIDS = (128, 256, 512)
FIXTURES = ("sine", "steady", "meridian")


def sine_error(N, t=0.1, dt=1e-4, modes=(1.0,)):
    """Sup error of the ``n = 1`` run on ``[0, 1]`` against the sine-series oracle.

    The datum is smooth and compatible with the boundary data, so no
    backward-Euler startup steps are taken: the run measures the
    trapezoidal scheme alone.
    """
    cfg = SolverConfig(dt=dt, nr=N, t_final=t, startup_steps=0)
    fld = evolve_radial(series_oracle_1d(list(modes), 0.0), 1, cfg)
    return float(np.max(np.abs(fld.values[-1] - series_oracle_1d(list(modes), t)(fld.r))))


def steady_error(N, n=2, t=1.0):
    """Largest drift of ``u_inf`` over any single step of a run to ``t``."""
    u0 = steady_state(n)
    cfg = SolverConfig(nr=N, t_final=t, every_step=True)
    fld = evolve_radial(u0, n, cfg)
    return float(np.max(np.abs(np.diff(fld.values, axis=0))))


def bumped_steady(n=2, amp=0.5) -> RadialProfile:
    """``u_inf + amp sin(pi (r - 1))`` on ``(1, 2)``: smooth, compatible with the boundary data."""
    base = steady_state(n)
    dom = AnnulusDomain(n, 1.0, 2.0)

    def f(r):
        return base(r) + amp * np.sin(np.pi * (np.asarray(r) - 1))

    def df(r):
        return base.derivative(r, 1) + amp * np.pi * np.cos(np.pi * (np.asarray(r) - 1))

    def d2f(r):
        return base.derivative(r, 2) - amp * np.pi ** 2 * np.sin(np.pi * (np.asarray(r) - 1))

    return RadialProfile(dom, f, df, d2f, name="bumped_steady")


def meridian_error(N, n=2, t=0.1, dt=1e-4, ntheta=17, reference_nr=8193):
    """Meridian run on radial data at ``nr = N`` against a fine radial reference."""
    u0 = bumped_steady(n)
    cfg = SolverConfig(dt=dt, nr=N, ntheta=ntheta, t_final=t)
    mer = evolve_meridian(MeridianField.from_radial(u0, N, ntheta), n, cfg)
    ref = evolve_radial(u0, n, cfg.with_(nr=reference_nr))
    exact = np.interp(mer.r, ref.r, ref.values[-1])
    return float(np.max(np.abs(mer.values[-1] - exact[:, None])))


def run_fixture(name, grids=GRIDS) -> ConvergenceResult:
    runs = {"sine": sine_error, "steady": steady_error, "meridian": meridian_error}
    if name not in runs:
        raise ValueError(f"unknown fixture {name!r}; expected one of {FIXTURES}")
    return convergence_study(runs[name], grids)
