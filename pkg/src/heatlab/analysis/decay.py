"""The radial decay estimate ``f(r1) <= (1 - sigma) f(r0)``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..pde_solver import RadialGrid, SpaceTimeField
from ..profiles import AnnulusDomain, RadialProfile

TOL_DECAY = 1e-9


def decay_sigma(r0, r1, r_out=2.0):
    """``sigma = (r1 - r0) / (r_out + r1 - 2 r0)``; ``r_out = 2`` gives the annulus (1, 2)."""
    return (r1 - r0) / (r_out + r1 - 2 * r0)


@dataclass
class DecayCheck:
    r0: float
    r1: float
    sigma: float
    f0: float
    f1: float
    slack: float
    applicable: bool
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.applicable and self.slack >= -TOL_DECAY


def _hypotheses(values, r, n, tol):
    lap = RadialGrid(AnnulusDomain(n, float(r[0]), float(r[-1])), r.size).apply(values)[1:-1]
    dr = np.gradient(values, r, edge_order=2)
    problems = []
    if abs(values[0] - 1) > 1e-9 or abs(values[-1]) > 1e-9:
        problems.append("boundary values are not 1 and 0")
    if dr.max() > tol:
        problems.append(f"f_r reaches {dr.max():.3e} > 0")
    if lap.min() < -tol:
        problems.append(f"Delta f reaches {lap.min():.3e} < 0")
    return problems


def radial_decay_check(profile: RadialProfile, r0: float, r1: float, tol_hyp=1e-8) -> DecayCheck:
    """Verify ``f(r1) <= (1 - sigma) f(r0) + 1e-9`` for a radial profile.

    The hypotheses (``f = 1, 0`` at the ends, ``f_r <= 0``, ``Delta f >= 0``)
    are checked first on the profile's samples (or on 2049 samples of a
    closed-form profile); if they fail the result is marked inapplicable.
    """
    d = profile.domain
    if not (d.r_in < r0 < r1 < d.r_out):
        return DecayCheck(r0, r1, np.nan, np.nan, np.nan, np.nan, False,
                          "need r_in < r0 < r1 < r_out")
    if profile.is_sampled:
        r, vals = profile.r, profile.values
    else:
        r = d.radial_grid(2049)
        vals = profile(r)
    problems = _hypotheses(vals, r, d.n, tol_hyp)
    sigma = decay_sigma(r0, r1, d.r_out)
    f0 = float(profile(r0))
    f1 = float(profile(r1))
    slack = (1 - sigma) * f0 - f1
    return DecayCheck(r0, r1, sigma, f0, f1, float(slack), not problems, "; ".join(problems))


def decay_lattice(field_: SpaceTimeField, radii=None, snapshots=None):
    """Run :func:`radial_decay_check` on every ``r0 < r1`` lattice pair and snapshot ``t > 0``.

    Returns ``(checks, failures)`` where ``checks`` is a list of
    ``(t, DecayCheck)``.
    """
    if field_.kind != "radial":
        raise ValueError("the decay lattice needs a radial evolution")
    d = field_.domain
    if radii is None:
        radii = np.linspace(d.r_in, d.r_out, 12)[1:-1]
    ks = range(len(field_.times)) if snapshots is None else snapshots
    checks = []
    for k in ks:
        t = float(field_.times[k])
        if t <= 0:
            continue
        prof = field_.snapshot(k)
        for r0 in radii:
            for r1 in radii:
                if r1 > r0:
                    checks.append((t, radial_decay_check(prof, float(r0), float(r1))))
    failures = [c for c in checks if not c[1].passed]
    return checks, failures
