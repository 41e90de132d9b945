"""Superlevel sets ``{u >= c}`` joined with the inner hole."""

from __future__ import annotations

import numpy as np

from ..geometry import Point
from ..profiles import MeridianField, RadialProfile, interp_polar


class SuperlevelSet:
    """Signed membership ``u(x) - c`` on the closed annulus, in the x1-x2 plane.

    Points inside the hole (``|x| < r_in``) get ``+inf``; points beyond the
    outer circle get ``-inf``.  Meridian fields are interpolated bilinearly
    on their ``(r, theta)`` grid.
    """

    def __init__(self, snapshot, c: float):
        self.snapshot = snapshot
        self.c = float(c)
        self.domain = snapshot.domain

    def value(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        r = np.hypot(x1, x2)
        snap = self.snapshot
        if isinstance(snap, RadialProfile):
            u = snap(np.clip(r, self.domain.r_in, self.domain.r_out))
        elif isinstance(snap, MeridianField):
            u = interp_polar(snap.r, snap.theta, snap.values, x1, np.abs(x2))
        else:
            raise TypeError("expected a RadialProfile or MeridianField snapshot")
        out = np.asarray(u - self.c, dtype=float)
        out = np.where(r < self.domain.r_in, np.inf, out)
        return np.where(r > self.domain.r_out, -np.inf, out)

    __call__ = value

    def contains(self, p: Point) -> bool:
        q = p.to_meridian()
        return bool(self.value(q.coords[0], q.coords[1]) >= 0)


def superlevel_membership(snapshot, c: float) -> SuperlevelSet:
    """Membership predicate of ``{u >= c}`` union the inner ball."""
    return SuperlevelSet(snapshot, c)
