"""Plain-text formats: CSV tables, key=value reports and configs, SVG figures."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .pde_solver import SolverConfig, SpaceTimeField
from .profiles import AnnulusDomain, MeridianField, RadialProfile

CONFIG_KEYS = ("scheme", "dt", "nr", "ntheta", "t_final", "snapshots")


def fmt(x) -> str:
    """Full-precision decimal (17 significant digits) for floats."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, (tuple, list)):
        return ",".join(fmt(v) for v in x)
    return str(x)


def write_csv(path, header, columns):
    path = Path(path)
    cols = [np.asarray(c).ravel() for c in columns]
    if len({c.size for c in cols}) > 1:
        raise ValueError("CSV columns differ in length")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path} is empty")
    header = rows[0]
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    return header, data.reshape(-1, len(header))


def write_kv(path, mapping):
    with open(path, "w", newline="\n") as fh:
        for k, v in mapping.items():
            fh.write(f"{k}={fmt(v)}\n")
    return Path(path)


def read_kv(path) -> dict:
    out = {}
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{ln}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def config_from_kv(mapping: dict, base: SolverConfig | None = None) -> SolverConfig:
    """Build a :class:`SolverConfig` from string values; unknown keys are rejected."""
    unknown = set(mapping) - set(CONFIG_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    kw = {}
    for k, v in mapping.items():
        if k == "scheme":
            kw[k] = str(v)
        elif k in ("nr", "ntheta"):
            kw[k] = int(v)
        elif k == "snapshots":
            kw[k] = tuple(float(x) for x in str(v).split(",") if x.strip())
        else:
            kw[k] = None if str(v).lower() == "none" else float(v)
    return (base or SolverConfig()).with_(**kw)


def config_to_kv(cfg: SolverConfig) -> dict:
    return {k: getattr(cfg, k) for k in CONFIG_KEYS}


# profiles and fields

def write_profile_csv(path, profile: RadialProfile, num=None):
    if profile.is_sampled and num is None:
        r, vals = profile.r, profile.values
    else:
        r = profile.domain.radial_grid(num or 2049)
        vals = profile(r)
    return write_csv(path, ["r", "value"], [r, vals])


def read_profile_csv(path, n: int) -> RadialProfile:
    header, data = read_csv(path)
    if header != ["r", "value"]:
        raise ValueError(f"{path}: expected columns r,value")
    r, vals = data[:, 0], data[:, 1]
    return RadialProfile.from_samples(AnnulusDomain(n, r[0], r[-1]), r, vals)


def write_field_csv(path, fld: MeridianField):
    R, T = np.meshgrid(fld.r, fld.theta, indexing="ij")
    return write_csv(path, ["z", "rho", "value"], [R * np.cos(T), R * np.sin(T), fld.values])


def read_field_csv(path, n: int) -> MeridianField:
    """Inverse of :func:`write_field_csv` (rows ordered radius-major)."""
    header, data = read_csv(path)
    if header != ["z", "rho", "value"]:
        raise ValueError(f"{path}: expected columns z,rho,value")
    z, rho, vals = data.T
    r = np.hypot(z, rho)
    nr = np.unique(np.round(r, 9)).size
    if data.shape[0] % nr:
        raise ValueError(f"{path}: rows do not form an (r, theta) grid")
    nt = data.shape[0] // nr
    rr = r.reshape(nr, nt)[:, 0]
    th = np.arctan2(rho, z).reshape(nr, nt)[0]
    return MeridianField(AnnulusDomain(n, rr[0], rr[-1]), rr, th, vals.reshape(nr, nt))


def write_snapshots(directory, fld: SpaceTimeField):
    """One CSV per snapshot plus ``index.csv`` listing ``(snapshot_id, t)``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    files = []
    for k in range(len(fld.times)):
        p = d / f"snapshot_{k:04d}.csv"
        snap = fld.snapshot(k)
        if fld.kind == "radial":
            write_profile_csv(p, snap)
        else:
            write_field_csv(p, snap)
        files.append(p)
    write_csv(d / "index.csv", ["snapshot_id", "t"], [np.arange(len(fld.times)), fld.times])
    return files


# SVG

class SvgCanvas:
    """Minimal SVG serializer over data-space polylines, circles and labels."""

    def __init__(self, xlim, ylim, width=480, height=480, pad=30):
        self.xlim, self.ylim = xlim, ylim
        self.width, self.height, self.pad = width, height, pad
        self.items = []

    def _map(self, x, y):
        (x0, x1), (y0, y1) = self.xlim, self.ylim
        sx = (self.width - 2 * self.pad) / (x1 - x0)
        sy = (self.height - 2 * self.pad) / (y1 - y0)
        return self.pad + (np.asarray(x) - x0) * sx, self.height - self.pad - (np.asarray(y) - y0) * sy

    def polyline(self, x, y, stroke="black", width=1.0, dash=None):
        px, py = self._map(x, y)
        pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(px, py))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<polyline points="{pts}" fill="none" stroke="{stroke}" '
                          f'stroke-width="{width}"{extra}/>')

    def marker(self, x, y, label="", radius=3.0, fill="black"):
        px, py = self._map(x, y)
        self.items.append(f'<circle cx="{float(px):.3f}" cy="{float(py):.3f}" r="{radius}" fill="{fill}"/>')
        if label:
            self.text(x, y, label, dx=6, dy=-6)

    def text(self, x, y, label, dx=0, dy=0, size=12):
        px, py = self._map(x, y)
        self.items.append(f'<text x="{float(px) + dx:.3f}" y="{float(py) + dy:.3f}" '
                          f'font-size="{size}" font-family="sans-serif">{label}</text>')

    def axes(self):
        (x0, x1), (y0, y1) = self.xlim, self.ylim
        self.polyline([x0, x1], [y0, y0], stroke="#888")
        self.polyline([x0, x0], [y0, y1], stroke="#888")

    def to_string(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
                f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">')
        return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *self.items,
                          "</svg>"]) + "\n"

    def save(self, path):
        Path(path).write_text(self.to_string())
        return Path(path)


def ellipse_points(b, R, num=361):
    """Boundary of ``b^2 x^2 + y^2 = R^2`` as two arrays."""
    t = np.linspace(0, 2 * math.pi, num)
    return R / b * np.cos(t), R * np.sin(t)
