"""Non-convex superlevel sets from ``u0 = (1 - eps) V + eps W``.

The heat flow is linear, so ``v`` (from ``V = V_{5/4}``) and ``w`` (from the
stretched bump ``W``) are evolved once and combined afterwards.  With a
witness triple ``X, Y, Z`` and ``s = W|E_{R-}``, the traces
``alpha = v(X)/s`` and ``beta = w(Z)`` decide the time ``t0`` and ``eps``;
the witness is certified when ``c - u(Z, t0)`` exceeds ten times a
Richardson estimate of the errors at the three points.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..geometry import (ConvexityWitness, EllipsoidSpec, PairSampler, Point, WitnessTriple,
                        convexity_scan, witness_search)
from ..initial_data import StretchedBump, choose_kappa, make_V
from ..pde_solver import SolverConfig, SpaceTimeField, evolve_meridian, evolve_radial
from ..profiles import MeridianField
from .decay import decay_sigma
from .superlevel import superlevel_membership

log = logging.getLogger(__name__)

R0, R1 = 1.25, 1.5
ETA1_CANDIDATES = (0.2, 0.15, 0.1, 0.08, 0.06, 0.05, 0.04, 0.03, 0.025, 0.02, 0.015, 0.01, 0.005)
TINY = np.finfo(float).tiny


def default_config(nr=513, ntheta=513, t_final=2e-2, count=40, t_first=1e-6) -> SolverConfig:
    """Geometric snapshot times from ``t_first`` to ``t_final`` with a growing step."""
    snaps = tuple(float(t) for t in np.geomspace(t_first, t_final, count))
    return SolverConfig(scheme="trapezoidal", dt=t_first / 10, nr=nr, ntheta=ntheta,
                        t_final=t_final, snapshots=snaps, startup_steps=4,
                        dt_growth=1.05, dt_max=t_final / 200)


def refined_config(cfg: SolverConfig) -> SolverConfig:
    return cfg.with_(nr=2 * cfg.nr - 1, ntheta=2 * cfg.ntheta - 1, dt=cfg.dt / 2,
                     dt_max=None if cfg.dt_max is None else cfg.dt_max / 2,
                     startup_steps=2 * cfg.startup_steps)


@dataclass
class Theorem1State:
    s: float
    times: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    sigma: float
    eps: float = np.nan
    t0: float = np.nan

    @property
    def conditions_hold(self) -> bool:
        k = int(np.argmin(np.abs(self.times - self.t0))) if np.isfinite(self.t0) else None
        if k is None:
            return False
        return (self.s > 0 and self.eps == self.alpha[k] and 0 < self.eps < 0.5
                and self.beta[k] < self.sigma * self.s / 2)


@dataclass
class EtaChoice:
    eta1: float
    eta2: float
    kappa: float
    triple: WitnessTriple
    sigma: float
    s: float
    tried: list = field(default_factory=list)


@dataclass
class Theorem1Result:
    n: int
    kappa: float
    etas: EtaChoice | None
    state: Theorem1State | None
    witness: ConvexityWitness | None
    scan_confirmed: bool = False
    candidates: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return (self.witness is not None and self.witness.certified and self.state is not None
                and self.state.conditions_hold)


def choose_etas(n, bump: StretchedBump, eta1_candidates=ETA1_CANDIDATES, eta2_count=48,
                size=128) -> EtaChoice | None:
    """Largest ``eta1`` admitting a witness triple, then the ``eta2`` maximising ``sigma``.

    ``eta2`` runs over ``(0, 1/4)`` capped so that the sphere stays inside
    the long semi-axis of ``E_{3/2}``.  Larger ``eta1`` means a larger
    ``s``, which is what every later inequality is measured against.
    """
    outer = EllipsoidSpec(bump.b_at(R1), R1, n)
    cap = min(0.25, outer.semi_axis - R1)
    eta2_grid = np.linspace(0, cap, eta2_count + 2)[1:-1]
    tried = []
    for eta1 in eta1_candidates:
        Rm = R1 - eta1
        inner = EllipsoidSpec(bump.b_at(Rm), Rm, n)
        best = None
        for eta2 in eta2_grid:
            Rp = R1 + eta2
            ws = witness_search(Rp, outer, inner, size=size)
            if ws.triple is None:
                continue
            sig = decay_sigma(Rp, ws.triple.Z.norm)
            if best is None or sig > best[1]:
                best = (float(eta2), float(sig), ws.triple)
        tried.append((eta1, None if best is None else best[1]))
        if best is not None:
            eta2, sig, _ = best
            triple = witness_search(R1 + eta2, outer, inner).triple
            sig = decay_sigma(R1 + eta2, triple.Z.norm)
            return EtaChoice(eta1, eta2, bump.kappa, triple, sig, bump.level(Rm), tried)
    return None


def _values_at(v: SpaceTimeField, w: SpaceTimeField, k: int, p: Point):
    q = p.to_meridian()
    z, rho = q.coords
    return float(v.at(k, np.hypot(z, rho))), float(w.at(k, (np.array([z]), np.array([rho])))[0])


def combined_values(v, w, k, eps, points):
    out = []
    for p in points:
        vv, ww = _values_at(v, w, k, p)
        out.append((1 - eps) * vv + eps * ww)
    return out


def traces(v, w, triple: WitnessTriple, s: float):
    alpha, beta = [], []
    for k in range(len(v.times)):
        vX, _ = _values_at(v, w, k, triple.X)
        _, wZ = _values_at(v, w, k, triple.Z)
        alpha.append(vX / s)
        beta.append(wZ)
    return np.array(alpha), np.array(beta)


def build_witness(v, w, k, triple, s, fine=None) -> ConvexityWitness:
    """Witness at snapshot ``k`` with ``eps = alpha(t_k)`` and ``c = (1 - eps) s eps``."""
    vX, _ = _values_at(v, w, k, triple.X)
    eps = vX / s
    c = (1 - eps) * s * eps
    uX, uY, uZ = combined_values(v, w, k, eps, (triple.X, triple.Y, triple.Z))
    wit = ConvexityWitness(triple.X, triple.Y, triple.Z, (uX, uY, uZ), c - uZ, level=c,
                           t0=float(v.times[k]))
    wit.extras.update(eps=eps, s=s, snapshot=k)
    if fine is not None:
        fv, fw = fine
        kf = int(np.argmin(np.abs(fv.times - v.times[k])))
        fX, fY, fZ = combined_values(fv, fw, kf, eps, (triple.X, triple.Y, triple.Z))
        eX, eY, eZ = (4.0 / 3.0 * abs(a - b) for a, b in ((uX, fX), (uY, fY), (uZ, fZ)))
        wit.error_budget = 10.0 * (max(eX, eY) + eZ)
        wit.extras.update(richardson=(eX, eY, eZ), fine_values=(fX, fY, fZ))
    else:
        wit.error_budget = np.inf
    return wit


def revalidate_witness(wit: ConvexityWitness, v, w):
    """Re-interpolate the snapshots and return ``(uX - c, uY - c, c - uZ - margin)``."""
    k = wit.extras["snapshot"]
    eps = wit.extras["eps"]
    uX, uY, uZ = combined_values(v, w, k, eps, (wit.X, wit.Y, wit.Z))
    return uX - wit.level, uY - wit.level, wit.level - uZ - wit.margin


def combined_field(v, w, k, eps) -> MeridianField:
    vr = np.interp(w.r, v.r, v.values[k])
    vals = (1 - eps) * vr[:, None] + eps * w.values[k]
    return MeridianField(w.domain, w.r, w.theta, vals, name=f"u(t={v.times[k]:.3g})")


def confirm_by_scan(v, w, wit: ConvexityWitness, radius=None, k_pts=9):
    """Pair scan of ``{u(., t0) >= c}`` around ``X`` and ``Y``."""
    k = wit.extras["snapshot"]
    u = combined_field(v, w, k, wit.extras["eps"])
    member = superlevel_membership(u, wit.level)
    if radius is None:
        radius = 0.5 * (w.r[1] - w.r[0])
    X = wit.X.to_meridian().coords
    Y = wit.Y.to_meridian().coords
    found = convexity_scan(member, u.domain, PairSampler.around([X, Y], radius, k_pts))
    return found


def run_theorem1(n=2, cfg: SolverConfig | None = None, kappa_start=0.24, W_override=None,
                 richardson=True, eta1_candidates=ETA1_CANDIDATES) -> Theorem1Result:
    """Follow the construction end to end and try to certify a witness.

    ``W_override`` replaces the stretched bump (the control run passes a
    radial bump here).  Returns a result whose ``passed`` is true only for
    a certified witness satisfying ``eps = alpha(t0) < 1/2`` and
    ``beta(t0) < sigma s / 2``.
    """
    start = time.perf_counter()
    cfg = cfg or default_config()
    V = make_V(n, R0)
    if W_override is None:
        ks = choose_kappa(n, R0, R1, cfg.nr, cfg.ntheta, start=kappa_start)
        bump = ks.bump
    else:
        bump = W_override
    res = Theorem1Result(n, bump.kappa, None, None, None)
    etas = choose_etas(n, bump, eta1_candidates)
    if etas is None:
        res.notes.append("no witness triple for any eta1 candidate: superlevel sets of W "
                         "and V near E_{3/2} form a convex union")
        res.wall_time = time.perf_counter() - start
        return res
    res.etas = etas
    triple, s, sigma = etas.triple, etas.s, etas.sigma
    v = evolve_radial(V, n, cfg)
    w = evolve_meridian(bump.field, n, cfg)
    alpha, beta = traces(v, w, triple, s)
    state = Theorem1State(s, v.times, alpha, beta, sigma)
    res.state = state
    times = v.times
    cond = (alpha > 0) & (alpha < 0.5) & (beta < sigma * s / 2) & (times > 0)
    resolvable = cond & ((1 - alpha) * s * alpha >= TINY)
    ks = np.nonzero(resolvable)[0]
    res.notes.append(f"s = {s:.6e}, sigma = {sigma:.6e}, eta1 = {etas.eta1}, eta2 = {etas.eta2:.4f}")
    res.notes.append(f"snapshots meeting both conditions: {int(cond.sum())}, "
                     f"with a normal-range level c: {ks.size}")
    if ks.size == 0:
        if cond.any():
            kl = int(np.nonzero(cond)[0][-1])
            res.notes.append(f"latest admissible t = {times[kl]:.3e} has alpha = {alpha[kl]:.3e}; "
                             "the level (1 - eps) s eps underflows double precision")
        res.wall_time = time.perf_counter() - start
        return res
    fine = None
    if richardson:
        fcfg = refined_config(cfg).with_(t_final=float(times[ks[-1]]),
                                         snapshots=tuple(float(times[k]) for k in ks))
        fine = (evolve_radial(V, n, fcfg), evolve_meridian(bump.field, n, fcfg))
    chosen = None
    for k in ks:
        wit = build_witness(v, w, int(k), triple, s, fine)
        res.candidates.append(wit)
        if chosen is None and wit.certified and wit.values[0] >= wit.level and wit.values[1] >= wit.level:
            chosen = wit
    if chosen is None:
        chosen = res.candidates[0]
        best = max(res.candidates, key=lambda c: c.margin / c.error_budget if c.error_budget > 0 else np.inf)
        res.notes.append(f"no candidate certified; best margin/budget = "
                         f"{best.margin / best.error_budget:.3e} at t = {best.t0:.3e}")
    res.witness = chosen
    state.eps = chosen.extras["eps"]
    state.t0 = chosen.t0
    res.scan_confirmed = confirm_by_scan(v, w, chosen) is not None
    res.wall_time = time.perf_counter() - start
    return res


@dataclass
class ControlResult:
    triples_found: int
    scans: int
    witnesses: list

    @property
    def passed(self) -> bool:
        return self.triples_found == 0 and not self.witnesses


def radial_bump(n, nr, ntheta) -> StretchedBump:
    """``V_{3/2}`` dressed as a stretched bump with ``kappa = 0`` (all ellipsoids are spheres)."""
    from ..initial_data import make_W
    return make_W(n, R0, R1, 0.0, nr, ntheta)


def run_theorem1_control(n=2, cfg: SolverConfig | None = None, levels=8, eps_values=(0.1, 0.3, 0.5),
                         sampler: PairSampler | None = None) -> ControlResult:
    """Same pipeline with ``W = V_{3/2}``: no triple and no pair-scan witness at any snapshot."""
    cfg = cfg or default_config()
    bump = radial_bump(n, cfg.nr, cfg.ntheta)
    outer = EllipsoidSpec(1.0, R1, n)
    found = 0
    for eta1 in ETA1_CANDIDATES:
        inner = EllipsoidSpec(1.0, R1 - eta1, n)
        for eta2 in np.linspace(0.005, 0.245, 25):
            if witness_search(R1 + eta2, outer, inner, size=64).triple is not None:
                found += 1
    v = evolve_radial(make_V(n, R0), n, cfg)
    w = evolve_meridian(bump.field, n, cfg)
    sampler = sampler or PairSampler.polar(w.domain, 20, 40)
    witnesses = []
    scans = 0
    probe_r = np.linspace(1.05, 1.95, levels)
    for k in range(1, len(v.times)):
        for eps in eps_values:
            u = combined_field(v, w, k, eps)
            prof = np.interp(probe_r, u.r, u.values[:, 0])
            for c in prof[prof > 1e-12]:
                scans += 1
                hit = convexity_scan(superlevel_membership(u, c), u.domain, sampler)
                if hit is not None:
                    witnesses.append((float(v.times[k]), eps, float(c), hit))
    return ControlResult(found, scans, witnesses)
