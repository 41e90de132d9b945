"""Points, ellipsoids and non-convexity witnesses.

Everything here is planar in practice: the data are axisymmetric about the
x1-axis, so witnesses are searched for in the x1-x2 plane and lifted to
``R^n`` by padding with zeros.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .profiles import AnnulusDomain

FRAMES = ("full", "meridian")


@dataclass(frozen=True)
class Point:
    """A point in ``R^n`` (``frame="full"``) or in the meridian half-plane ``(z, rho)``."""

    coords: tuple
    frame: str = "full"

    def __post_init__(self):
        c = tuple(float(x) for x in np.ravel(self.coords))
        object.__setattr__(self, "coords", c)
        if self.frame not in FRAMES:
            raise ValueError(f"unknown frame {self.frame!r}")
        if self.frame == "meridian":
            if len(c) != 2 or c[1] < 0:
                raise ValueError("meridian points are (z, rho) with rho >= 0")
        elif len(c) < 1:
            raise ValueError("empty point")

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)

    @property
    def norm(self) -> float:
        return float(np.hypot.reduce(self.coords)) if self.dim > 1 else abs(self.coords[0])

    def to_meridian(self) -> "Point":
        if self.frame == "meridian":
            return self
        x = self.array
        return Point((x[0], float(np.linalg.norm(x[1:]))), "meridian")

    def lift(self, n: int) -> "Point":
        """Full-frame point in ``R^n`` lying in the x1-x2 plane."""
        if self.frame == "full":
            if self.dim != n:
                raise ValueError("dimension mismatch")
            return self
        return Point((self.coords[0], self.coords[1]) + (0.0,) * (n - 2), "full")


@dataclass(frozen=True)
class EllipsoidSpec:
    """``b^2 x1^2 + x2^2 + ... + xn^2 = R^2``; ``b = 1`` is the sphere of radius ``R``."""

    b: float
    R: float
    n: int = 2

    def __post_init__(self):
        if not (0 < self.b <= 1):
            raise ValueError(f"b must lie in (0, 1], got {self.b}")
        if self.R <= 0 or self.n < 2:
            raise ValueError("need R > 0 and n >= 2")

    @property
    def semi_axis(self) -> float:
        """Half-length along x1."""
        return self.R / self.b

    def surface_point(self, psi):
        """Planar surface point at parameter ``psi`` (``psi = 0`` on the +x1 axis)."""
        psi = np.asarray(psi, dtype=float)
        return self.semi_axis * np.cos(psi), self.R * np.sin(psi)


def _quadratic(b, R, x1, rest_sq):
    return b * b * x1 * x1 + rest_sq - R * R


def ellipsoid_membership(spec: EllipsoidSpec, p: Point) -> float:
    """Signed value ``b^2 p1^2 + sum_{i>=2} p_i^2 - R^2`` (negative inside)."""
    if p.frame != "full" or p.dim != spec.n:
        raise ValueError(f"expected a full-frame point in R^{spec.n}, got {p}")
    x = p.array
    return float(_quadratic(spec.b, spec.R, x[0], float(np.dot(x[1:], x[1:]))))


def midpoint(p: Point, q: Point) -> Point:
    if p.frame != q.frame or p.dim != q.dim:
        raise ValueError("midpoint needs points in the same frame and dimension")
    return Point(tuple(0.5 * (a + b) for a, b in zip(p.coords, q.coords)), p.frame)


# ---------------------------------------------------------------------------
# witness triples

@dataclass(frozen=True)
class WitnessTriple:
    """``X`` on the sphere, ``Y`` on ``inner``, ``Z = (X+Y)/2`` outside sphere and ``outer``."""

    X: Point
    Y: Point
    Z: Point
    containing_sphere_radius: float
    outer_ellipsoid: EllipsoidSpec
    inner_ellipsoid: EllipsoidSpec
    clearance: float
    params: tuple = ()

    def recheck(self) -> float:
        """Clearance recomputed from the stored points."""
        return triple_clearance(self.containing_sphere_radius, self.outer_ellipsoid, self.Z)


def triple_clearance(R_plus, outer: EllipsoidSpec, Z: Point) -> float:
    """``min(|Z|^2 - R_plus^2, outer form at Z)``; positive means outside both."""
    z = Z.array
    sphere = float(np.dot(z, z) - R_plus ** 2)
    return min(sphere, ellipsoid_membership(outer, Z))


@dataclass
class WitnessSearch:
    triple: WitnessTriple | None
    best_clearance: float
    best_params: tuple
    rounds: int


def _clearance_grid(R_plus, outer, inner, phi, psi):
    P, S = np.meshgrid(phi, psi, indexing="ij")
    x1 = 0.5 * (R_plus * np.cos(P) + inner.semi_axis * np.cos(S))
    x2 = 0.5 * (R_plus * np.sin(P) + inner.R * np.sin(S))
    sphere = x1 * x1 + x2 * x2 - R_plus ** 2
    ell = _quadratic(outer.b, outer.R, x1, x2 * x2)
    return np.minimum(sphere, ell)


def witness_search(R_plus: float, outer: EllipsoidSpec, inner: EllipsoidSpec,
                   size=256, rounds=3, refine=4) -> WitnessSearch:
    """Coarse-to-fine sweep over ``X = R_plus (cos phi, sin phi)``, ``Y`` on ``inner``.

    ``phi`` ranges over ``[0, pi]`` (the upper half-plane suffices by
    symmetry) and the parameter ``psi`` of ``Y`` over ``[-pi, pi]``.  Each
    round re-grids a window ``refine`` times narrower around the best cell.
    Ties go to the lexicographically smallest ``(phi, psi)``.
    """
    if inner.n != outer.n:
        raise ValueError("ellipsoids live in different dimensions")
    if inner.R > outer.R:
        raise ValueError("inner ellipsoid must be nested inside outer")
    lo = np.array([0.0, -np.pi])
    hi = np.array([np.pi, np.pi])
    best = None
    for _ in range(rounds):
        phi = np.linspace(lo[0], hi[0], size)
        psi = np.linspace(lo[1], hi[1], size)
        C = _clearance_grid(R_plus, outer, inner, phi, psi)
        i, j = np.unravel_index(int(np.argmax(C)), C.shape)
        best = (float(C[i, j]), float(phi[i]), float(psi[j]))
        half = 0.5 * (hi - lo) / refine
        centre = np.array([phi[i], psi[j]])
        lo = np.maximum(centre - half, [0.0, -np.inf])
        hi = np.minimum(centre + half, [np.pi, np.inf])
    clearance, ph, ps = best
    if clearance <= 0:
        return WitnessSearch(None, clearance, (ph, ps), rounds)
    n = outer.n
    X = Point((R_plus * np.cos(ph), R_plus * np.sin(ph)), "meridian").lift(n)
    y1, y2 = inner.surface_point(ps)
    Y = Point((float(y1), float(y2)) + (0.0,) * (n - 2), "full")
    Z = midpoint(X, Y)
    triple = WitnessTriple(X, Y, Z, R_plus, outer, inner, 0.0, (ph, ps))
    triple = WitnessTriple(X, Y, Z, R_plus, outer, inner, triple.recheck(), (ph, ps))
    return WitnessSearch(triple, triple.clearance, (ph, ps), rounds)


def find_witness_triple(R_plus: float, outer: EllipsoidSpec, inner: EllipsoidSpec,
                        **kw) -> WitnessTriple | None:
    """Best triple of :func:`witness_search`, or None when no positive clearance exists."""
    return witness_search(R_plus, outer, inner, **kw).triple


# ---------------------------------------------------------------------------
# pairwise convexity scan

@dataclass
class ConvexityWitness:
    """Points of a set whose midpoint is outside it.

    ``margin`` is how far the membership value at ``Z`` sits below the
    level.  ``level``, ``t0`` and ``error_budget`` are filled in when the set
    is a superlevel set of an evolved field.
    """

    X: Point
    Y: Point
    Z: Point
    values: tuple
    margin: float
    level: float = 0.0
    t0: float = 0.0
    error_budget: float = 0.0
    extras: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.margin > self.error_budget


@dataclass
class PairSampler:
    """Candidate points (meridian-plane ``(x1, x2)`` rows) for a pair scan."""

    points: np.ndarray

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.shape[1] != 2:
            raise ValueError("pair sampler points are (x1, x2) rows")

    @classmethod
    def polar(cls, domain: AnnulusDomain, nr=24, ntheta=48, half_plane=False):
        r = np.linspace(domain.r_in, domain.r_out, nr)
        top = np.pi
        bottom = 0.0 if half_plane else -np.pi
        th = np.linspace(bottom, top, ntheta, endpoint=half_plane)
        R, T = np.meshgrid(r, th, indexing="ij")
        return cls(np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()]))

    @classmethod
    def around(cls, centres, radius, k=9):
        """``k x k`` grids of half-width ``radius`` around each centre."""
        off = np.linspace(-radius, radius, k)
        dx, dy = np.meshgrid(off, off, indexing="ij")
        blocks = [np.column_stack([c[0] + dx.ravel(), c[1] + dy.ravel()]) for c in centres]
        return cls(np.vstack(blocks))


def convexity_scan(member: Callable, hole: AnnulusDomain | None, sampler: PairSampler,
                   tol=1e-12, chunk=2048) -> ConvexityWitness | None:
    """Search sampled pairs of the set for a midpoint outside it.

    ``member(x1, x2)`` returns a value that is ``>= 0`` exactly on the set
    (in the x1-x2 plane); points with ``|x| < hole.r_in`` belong to the set
    regardless.  The returned witness has the most negative midpoint value,
    and ``margin = -member(Z)``.  None if every midpoint value is
    ``>= -tol`` or the set has no sampled points.
    """
    P = sampler.points
    r = np.hypot(P[:, 0], P[:, 1])
    vals = member(P[:, 0], P[:, 1])
    inside = vals >= 0
    if hole is not None:
        inside |= r < hole.r_in
    S = P[inside]
    if len(S) == 0:
        return None
    best = (np.inf, -1, -1)
    for start in range(0, len(S), chunk):
        A = S[start:start + chunk]
        M = 0.5 * (A[:, None, :] + S[None, :, :])
        mv = member(M[..., 0], M[..., 1])
        if hole is not None:
            mv = np.where(np.hypot(M[..., 0], M[..., 1]) < hole.r_in, np.inf, mv)
        i, j = np.unravel_index(int(np.argmin(mv)), mv.shape)
        if mv[i, j] < best[0]:
            best = (float(mv[i, j]), start + i, j)
    if not best[0] < -tol:
        return None
    x, y = S[best[1]], S[best[2]]
    X = Point(x, "full")
    Y = Point(y, "full")
    Z = midpoint(X, Y)
    values = (float(member(*x)), float(member(*y)), best[0])
    return ConvexityWitness(X, Y, Z, values, -best[0])
