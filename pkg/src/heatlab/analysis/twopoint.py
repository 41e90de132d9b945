"""The two-point function ``H`` on equal-level pairs of space-time points."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..geometry import Point
from ..initial_data import make_u0_twopoint
from ..pde_solver import SolverConfig, SpaceTimeField, evolve_radial, steady_state

TOL_LEVEL = 1e-8


class LevelMismatch(ValueError):
    def __init__(self, mismatch):
        super().__init__(f"points are not on a common level: |u(x,s) - u(y,t)| = {mismatch:.3e}")
        self.mismatch = mismatch


@dataclass
class TwoPointSample:
    x: Point
    y: Point
    s: float
    t: float
    H: float
    level_error: float


class RadialEvaluator:
    """Value, gradient and ``u_t`` of a radial evolution at any radius and stored time."""

    def __init__(self, field_: SpaceTimeField):
        if field_.kind != "radial":
            raise ValueError("expected a radial evolution")
        self.field = field_
        self._cache = {}

    def _tables(self, k):
        if k not in self._cache:
            self._cache[k] = (self.field.radial_derivative(k), self.field.u_t(k))
        return self._cache[k]

    def value(self, k, r):
        return float(np.interp(r, self.field.r, self.field.values[k]))

    def grad(self, k, r):
        return float(np.interp(r, self.field.r, self._tables(k)[0]))

    def u_t(self, k, r):
        return float(np.interp(r, self.field.r, self._tables(k)[1]))


def _radius(p: Point):
    return p.norm


def two_point_H(field_: SpaceTimeField, x: Point, s: float, y: Point, t: float,
                tol_level=TOL_LEVEL, evaluator: RadialEvaluator | None = None) -> TwoPointSample:
    """``H = (Du(y,t) - Du(x,s)).(y - x) + (u_t(y,t) - u_t(x,s)) (t - s)``.

    For a radial field ``Du(p) = u_r(|p|) p/|p|``; ``u_r`` comes from centred
    differences of the snapshot and ``u_t`` from its discrete Laplacian.
    ``s`` and ``t`` must be stored snapshot times.
    """
    ev = evaluator or RadialEvaluator(field_)
    ks, kt = field_.index(s), field_.index(t)
    rx, ry = _radius(x), _radius(y)
    mismatch = abs(ev.value(ks, rx) - ev.value(kt, ry))
    if mismatch >= tol_level:
        raise LevelMismatch(mismatch)
    xa, ya = x.array, y.array
    gx = ev.grad(ks, rx) * xa / rx
    gy = ev.grad(kt, ry) * ya / ry
    H = float(np.dot(gy - gx, ya - xa) + (ev.u_t(kt, ry) - ev.u_t(ks, rx)) * (t - s))
    return TwoPointSample(x, y, float(s), float(t), H, float(mismatch))


@dataclass
class TwoPointSearchResult:
    eps: float
    n: int
    level: float
    gamma: float
    best: TwoPointSample
    trace_t: np.ndarray
    trace_H: np.ndarray
    trace_y1: np.ndarray
    refined_H: float | None = None
    max_on_initial_face: bool = False
    grad_bound: float = np.nan
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        ok = self.best.H > 0 and 0.70 <= self.level <= 0.80
        return ok and (self.refined_H is None or self.refined_H > 0)


def steady_gamma(level, n):
    """``gamma`` with ``u_inf(1 + gamma) = level`` on the annulus (1, 2)."""
    u_inf = steady_state(n)
    return brentq(lambda g: float(u_inf(1 + g)) - level, 0.0, 1.0, xtol=1e-15)


def _root_radius(ev, k, level, r_lo, r_hi, tol=1e-10):
    vals = ev.field.values[k]
    r = ev.field.r

    def g(x):
        return float(np.interp(x, r, vals)) - level
    if g(r_lo) < 0 or g(r_hi) > 0:
        return None
    lo, hi = r_lo, r_hi
    while True:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) < tol or hi - lo < 1e-15:
            return mid
        if gm > 0:
            lo = mid
        else:
            hi = mid


def two_point_trace(field_: SpaceTimeField, eps: float, n: int):
    """``H((x, 0), (y(t), t))`` for every stored ``t``, with ``y(t)`` on the level of ``x``."""
    ev = RadialEvaluator(field_)
    x = Point((1 + eps / 2,) + (0.0,) * (n - 1))
    level = ev.value(0, x.norm)
    ts, Hs, ys, samples = [], [], [], []
    d = field_.domain
    for k, t in enumerate(field_.times):
        y1 = _root_radius(ev, k, level, d.r_in, d.r_out)
        if y1 is None:
            continue
        y = Point((y1,) + (0.0,) * (n - 1))
        smp = two_point_H(field_, x, 0.0, y, float(t), evaluator=ev)
        ts.append(float(t))
        Hs.append(smp.H)
        ys.append(y1)
        samples.append(smp)
    return level, np.array(ts), np.array(Hs), np.array(ys), samples


def run_section4(eps=0.05, n=2, cfg: SolverConfig | None = None,
                 refine=True) -> TwoPointSearchResult:
    """Evolve the weight-``g`` datum and maximise ``H`` over the snapshots.

    ``x = (1 + eps/2, 0, ...)`` at ``s = 0``; for each snapshot ``y(t)`` is
    the point on the positive x1-axis at the same level (bisection, level
    tolerance 1e-10).  With ``refine`` the maximising time is re-evaluated
    on a grid with twice the resolution in space and time.
    """
    if cfg is None:
        cfg = SolverConfig(nr=1025, dt=2e-3, t_final=4.0,
                           snapshots=tuple(np.round(np.linspace(0.02, 4.0, 200), 12)))
    u0 = make_u0_twopoint(eps, n)
    field_ = evolve_radial(u0, n, cfg)
    level, ts, Hs, ys, samples = two_point_trace(field_, eps, n)
    if len(Hs) == 0:
        raise RuntimeError("the level of x never appears in the snapshots")
    j = int(np.argmax(Hs))
    best = samples[j]
    gamma = steady_gamma(level, n)
    res = TwoPointSearchResult(eps, n, level, gamma, best, ts, Hs, ys,
                         max_on_initial_face=bool(best.t == 0.0))
    res.notes.append(f"y1(T) - (1 + gamma) = {ys[-1] - 1 - gamma:.3e}")
    ev = RadialEvaluator(field_)
    res.grad_bound = max(abs(ev.grad(field_.index(t), y)) for t, y in zip(ts, ys))
    res.notes.append(f"max |u_r(y(t), t)| along the trace = {res.grad_bound:.6f}")
    if refine and best.t > 0:
        snaps = tuple(sorted(set(cfg.snapshots) | {best.t}))
        fine_cfg = cfg.with_(nr=2 * cfg.nr - 1, dt=(cfg.dt or 1.0 / (cfg.nr - 1)) / 2,
                             snapshots=snaps, t_final=max(cfg.t_final, best.t))
        fine = evolve_radial(u0, n, fine_cfg)
        _, fts, fHs, _, _ = two_point_trace(fine, eps, n)
        res.refined_H = float(fHs[np.argmin(np.abs(fts - best.t))])
    return res
