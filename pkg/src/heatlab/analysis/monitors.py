"""Snapshot-by-snapshot checks of the qualitative properties of the flow."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..pde_solver import SpaceTimeField

TOL_RANGE = 1e-9
TOL_UT = 1e-8
TOL_XGRAD = 1e-8


@dataclass
class SnapshotStats:
    t: float
    u_min: float
    u_max: float
    u_t_min: float
    u_t_max: float
    x_grad_max: float


@dataclass
class MonitorReport:
    """Per-snapshot extrema and the list of violations (t > 0 only)."""

    stats: list
    violations: list = field(default_factory=list)
    stationary: bool = False

    @property
    def clean(self) -> bool:
        return not self.violations

    def as_dict(self):
        worst = {
            "u_min": min(s.u_min for s in self.stats[1:]) if len(self.stats) > 1 else np.nan,
            "u_max": max(s.u_max for s in self.stats[1:]) if len(self.stats) > 1 else np.nan,
            "u_t_min": min(s.u_t_min for s in self.stats[1:]) if len(self.stats) > 1 else np.nan,
            "x_grad_max": max(s.x_grad_max for s in self.stats[1:]) if len(self.stats) > 1 else np.nan,
        }
        return {"snapshots": len(self.stats), "violations": len(self.violations),
                "stationary": self.stationary, **worst}


def monitor_proposition(field_: SpaceTimeField, tol_range=TOL_RANGE, tol_ut=TOL_UT,
                        tol_xgrad=TOL_XGRAD) -> MonitorReport:
    """Check ``0 < u < 1``, ``u_t >= 0`` and ``x . grad u <= 0`` at interior nodes.

    ``u_t`` is the discrete Laplacian of each snapshot.  A run whose
    ``|u_t|`` stays below ``tol_ut`` everywhere is flagged ``stationary``
    rather than reported as violating strict positivity.
    """
    stats = []
    violations = []
    moving = False
    for k, t in enumerate(field_.times):
        u = field_.values[k][1:-1]
        ut = field_.u_t(k)[1:-1]
        xg = field_.x_dot_grad(k)[1:-1]
        s = SnapshotStats(float(t), float(u.min()), float(u.max()), float(ut.min()),
                          float(ut.max()), float(xg.max()))
        stats.append(s)
        if t <= 0:
            continue
        if np.abs(ut).max() > tol_ut:
            moving = True
        if s.u_min <= -tol_range or s.u_max >= 1 + tol_range:
            violations.append((float(t), "range", s.u_min, s.u_max))
        if s.u_t_min < -tol_ut:
            violations.append((float(t), "u_t", s.u_t_min))
        if s.x_grad_max > tol_xgrad:
            violations.append((float(t), "x_grad", s.x_grad_max))
    return MonitorReport(stats, violations, stationary=not moving)
