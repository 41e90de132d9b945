"""``heatlab <build|evolve|verify|converge> [--key value ...]``.

Every completed run writes ``manifest.txt`` into its output directory.
Exit codes: 0 pass, 1 fail, 2 usage, 3 inapplicable.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (Inapplicable, decay_lattice, monitor_proposition, run_section4, run_theorem1,
                       run_theorem2)
from .fixtures import FIXTURES, GRIDS, run_fixture
from .initial_data import (InadmissibleParameters, check_admissible, choose_kappa, choose_R_thm2,
                           laplacian_lower_bound_check, make_g, make_u0_thm2, make_u0_twopoint,
                           make_V, make_W)
from .io import (SvgCanvas, config_from_kv, config_to_kv, ellipse_points, read_csv, read_field_csv,
                 read_kv, read_profile_csv, write_csv, write_field_csv, write_kv, write_profile_csv,
                 write_snapshots)
from .pde_solver import SolverConfig, evolve_meridian, evolve_radial, steady_state
from .profiles import RadialProfile

PASS, FAIL, USAGE, INAPPLICABLE = 0, 1, 2, 3
VERDICTS = {PASS: "pass", FAIL: "fail", INAPPLICABLE: "inapplicable"}

log = logging.getLogger("heatlab")


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    config: dict = field(default_factory=dict)
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    verdict: str = "fail"
    wall_time: float = 0.0
    warnings: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def as_dict(self):
        d = {"command": self.command, "verdict": self.verdict, "wall_time": self.wall_time,
             "version": __version__}
        d.update({f"config.{k}": v for k, v in self.config.items()})
        d.update({f"input.{i}": str(p) for i, p in enumerate(self.inputs)})
        d.update({f"output.{i}": str(p) for i, p in enumerate(self.outputs)})
        d.update({f"warning.{i}": w for i, w in enumerate(self.warnings)})
        d.update({f"detail.{k}": v for k, v in self.details.items()})
        return d

    def write(self, directory):
        path = Path(directory) / "manifest.txt"
        write_kv(path, self.as_dict())
        return path


def _out_dir(args):
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _flag(x: bool) -> int:
    return PASS if x else FAIL


# build

def cmd_build(args, man: RunManifest):
    kind = args.kind
    n = args.n
    man.config.update(kind=kind, n=n)
    if n < 1:
        raise UsageError("--n must be >= 1")
    try:
        if kind == "V":
            man.config["rho"] = args.rho
            u0 = make_V(n, args.rho)
            ok_bound, worst = laplacian_lower_bound_check(u0, n, args.rho)
            extra = {"lower_bound_pass": ok_bound, "lower_bound_worst": worst}
        elif kind == "W":
            if n < 2:
                raise UsageError("W needs n >= 2")
            if args.kappa is None:
                ks = choose_kappa(n, args.r0, args.r1, args.nr, args.ntheta)
                bump = ks.bump
            else:
                bump = make_W(n, args.r0, args.r1, args.kappa, args.nr, args.ntheta)
            man.config.update(r0=args.r0, r1=args.r1, nr=args.nr, ntheta=args.ntheta)
            u0 = bump
            extra = {"kappa": bump.kappa}
        elif kind == "thm2":
            R, attempts = choose_R_thm2(n)
            u0 = make_u0_thm2(R, n)
            extra = {"R": R, "attempts": len(attempts)}
        else:
            man.config["eps"] = args.eps
            wgt = make_g(args.eps, n)
            u0 = make_u0_twopoint(args.eps, n, weight=wgt)
            extra = {"normalization_residual": wgt.residual, "width": wgt.width,
                     "u0_at_1_plus_eps_half": float(u0(1 + args.eps / 2))}
    except (InadmissibleParameters, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    rep = check_admissible(u0)
    out = _out_dir(args)
    if kind == "W":
        data = write_field_csv(out / "field.csv", u0.field)
    else:
        data = write_profile_csv(out / "profile.csv", u0)
    report = rep.as_dict()
    report.update(extra)
    ok = rep.passed and extra.get("lower_bound_pass", True)
    if kind == "twopoint":
        ok = ok and abs(extra["normalization_residual"]) < 1e-10
    report["pass"] = ok
    man.outputs += [data, write_kv(out / "report.txt", report)]
    man.details.update(extra)
    return _flag(ok)


# evolve

def startup_warning(cfg: SolverConfig, h: float):
    """Flag a startup window whose first-order error outgrows the spatial error.

    Each backward-Euler step commits a local error of order ``dt^2``; when
    ``startup_steps * dt^2`` exceeds ``10 h^2`` the window dominates the
    second-order spatial error of the whole run.  A trapezoidal run with no
    startup window and ``dt > h`` is also flagged, since its stiff modes
    are barely damped.
    """
    dt = cfg.dt if cfg.dt is not None else h
    if cfg.startup_steps > 0 and cfg.startup_steps * dt ** 2 > 10 * h ** 2:
        return (f"dt = {dt:.3e} is too large for the first-order startup window "
                f"({cfg.startup_steps} steps, h = {h:.3e})")
    if cfg.startup_steps == 0 and cfg.scheme == "trapezoidal" and dt > h:
        return f"dt = {dt:.3e} > h = {h:.3e} without startup steps: stiff modes ring"
    return None


def _load_input(path: Path, n: int):
    header, _ = read_csv(path)
    if header == ["r", "value"]:
        return read_profile_csv(path, n)
    if header == ["z", "rho", "value"]:
        return read_field_csv(path, n)
    raise UsageError(f"{path}: unrecognised columns {header}")


def _solver_config(args, nr=None, ntheta=None):
    cfg = SolverConfig()
    if getattr(args, "config", None):
        try:
            cfg = config_from_kv(read_kv(args.config), cfg)
        except (OSError, ValueError) as exc:
            raise UsageError(f"bad config: {exc}") from exc
    over = {}
    for key in ("scheme", "dt", "t_final", "nr", "ntheta", "startup_steps"):
        v = getattr(args, key, None)
        if v is not None:
            over[key] = v
    if getattr(args, "snapshots", None):
        over["snapshots"] = tuple(float(x) for x in args.snapshots.split(","))
    if nr is not None:
        over["nr"] = nr
    if ntheta is not None:
        over["ntheta"] = ntheta
    try:
        return cfg.with_(**over)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_evolve(args, man: RunManifest):
    n = args.n
    if args.input:
        path = Path(args.input)
        if not path.exists():
            raise UsageError(f"no such input: {path}")
        try:
            u0 = _load_input(path, n)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        man.inputs.append(path)
    elif args.fixture == "steady":
        u0 = steady_state(n)
    else:
        raise UsageError("evolve needs --input FILE or --fixture steady")
    if isinstance(u0, RadialProfile):
        nr = u0.r.size if u0.is_sampled else None
        cfg = _solver_config(args, nr=nr)
        grid_r = u0.r if u0.is_sampled else u0.domain.radial_grid(cfg.nr)
        fld = evolve_radial(u0, n, cfg)
    else:
        cfg = _solver_config(args, nr=u0.r.size, ntheta=u0.theta.size)
        grid_r = u0.r
        fld = evolve_meridian(u0, n, cfg)
    man.config.update(config_to_kv(cfg), n=n, startup_steps=cfg.startup_steps)
    w = startup_warning(cfg, float(grid_r[1] - grid_r[0]))
    if w:
        man.warnings.append(w)
    out = _out_dir(args)
    man.outputs += write_snapshots(out / "snapshots", fld)
    man.outputs.append(out / "snapshots" / "index.csv")
    rep = monitor_proposition(fld)
    man.outputs.append(write_kv(out / "monitor.txt", rep.as_dict()))
    man.details.update(stationary=rep.stationary, violations=len(rep.violations))
    return _flag(rep.clean)


# verify

def _thm1_svg(res, path):
    triple = res.etas.triple
    lim = 2.1
    svg = SvgCanvas((-lim, lim), (-lim, lim))
    for spec, colour in ((triple.outer_ellipsoid, "black"), (triple.inner_ellipsoid, "#555")):
        x, y = ellipse_points(spec.b, spec.R)
        svg.polyline(x, y, stroke=colour)
    t = np.linspace(0, 2 * math.pi, 361)
    Rp = triple.containing_sphere_radius
    svg.polyline(Rp * np.cos(t), Rp * np.sin(t), stroke="#c00", dash="4,3")
    for name, p in (("X", triple.X), ("Y", triple.Y), ("Z", triple.Z)):
        q = p.to_meridian().coords
        svg.marker(q[0], q[1], name)
    return svg.save(path)


def verify_thm1(args, out, man):
    res = run_theorem1(args.n)
    wit = res.witness
    info = {"pass": res.passed, "kappa": res.kappa, "scan_confirmed": res.scan_confirmed,
            "wall_time": res.wall_time}
    if res.etas is not None:
        info.update(eta1=res.etas.eta1, eta2=res.etas.eta2, s=res.etas.s, sigma=res.etas.sigma)
    if wit is None:
        info["witness"] = "none"
    else:
        info.update(witness="found", t0=wit.t0, level=wit.level, margin=wit.margin,
                    error_budget=wit.error_budget, certified=wit.certified,
                    X=wit.X.coords, Y=wit.Y.coords, Z=wit.Z.coords, values=tuple(wit.values))
        info.update({k: v for k, v in wit.extras.items() if np.isscalar(v)})
    for i, note in enumerate(res.notes):
        info[f"note.{i}"] = note
    man.outputs.append(write_kv(out / "witness.txt", info))
    if res.state is not None:
        st = res.state
        man.outputs.append(write_csv(out / "alpha.csv", ["t", "alpha"], [st.times, st.alpha]))
        man.outputs.append(write_csv(out / "beta.csv", ["t", "beta"], [st.times, st.beta]))
    if res.etas is not None:
        man.outputs.append(_thm1_svg(res, out / "figure.svg"))
    if wit is not None:
        man.details.update(t0=wit.t0, margin=wit.margin, error_budget=wit.error_budget)
    return _flag(res.passed)


def verify_thm2(args, out, man):
    try:
        res = run_theorem2(args.n)
    except Inapplicable as exc:
        man.details["reason"] = str(exc)
        return INAPPLICABLE
    g = res.graph
    man.outputs.append(write_csv(out / "level_graph.csv", ["r", "f"], [g.r, g.f]))
    vals = {"pass": res.passed, "R": res.R, "r0": res.R + 0.5, "level": g.level,
            "u0_second": res.u0_second, "f_prime_formula": res.formula.f_prime,
            "f_second_formula": res.formula.f_second, "f_prime_fd": res.fd_f_prime,
            "f_second_fd": res.fd_f_second, "identity_error": res.identity_error,
            "fd_relative_gap": res.fd_relative_gap}
    man.outputs.append(write_kv(out / "f_second.txt", vals))
    svg = SvgCanvas((g.r[0], g.r[-1]), (0.0, float(g.f.max()) or 1.0))
    svg.axes()
    svg.polyline(g.r, g.f)
    svg.text(g.r[0], float(g.f.max()), "t = f(r)", dx=10, dy=14)
    man.outputs.append(svg.save(out / "level_graph.svg"))
    man.details.update(f_second=res.formula.f_second, f_second_fd=res.fd_f_second)
    return _flag(res.passed)


def verify_sec4(args, out, man):
    man.config["eps"] = args.eps
    res = run_section4(args.eps, args.n)
    man.outputs.append(write_csv(out / "H_trace.csv", ["t", "H"], [res.trace_t, res.trace_H]))
    b = res.best
    vals = {"pass": res.passed, "level": res.level, "gamma": res.gamma, "s": b.s, "t": b.t,
            "x": b.x.coords, "y": b.y.coords, "H": b.H, "level_error": b.level_error,
            "refined_H": res.refined_H if res.refined_H is not None else "none",
            "max_on_initial_face": res.max_on_initial_face}
    for i, note in enumerate(res.notes):
        vals[f"note.{i}"] = note
    man.outputs.append(write_kv(out / "max_sample.txt", vals))
    man.details.update(H=b.H, t=b.t)
    return _flag(res.passed)


def _decay_fixtures(args):
    if args.input:
        path = Path(args.input)
        if not path.exists():
            raise UsageError(f"no such input: {path}")
        u0 = _load_input(path, args.n)
        if not isinstance(u0, RadialProfile):
            raise UsageError("decay-lemma takes a radial profile")
        return [(path.stem, u0, u0.r.size)]
    return [("V_5/4", make_V(args.n, 1.25), 1025), ("twopoint", make_u0_twopoint(0.05, args.n), 1025)]


def verify_decay(args, out, man):
    rows = []
    total_fail = 0
    for name, u0, nr in _decay_fixtures(args):
        cfg = SolverConfig(nr=nr, t_final=1.0, snapshots=tuple(np.linspace(0.05, 1.0, 20)))
        fld = evolve_radial(u0, args.n, cfg)
        checks, failures = decay_lattice(fld)
        total_fail += len(failures)
        rows += [(name, c) for c in checks]
    write = out / "decay_lattice.csv"
    with open(write, "w", newline="\n") as fh:
        fh.write("fixture,t,r0,r1,sigma,f_r0,f_r1,slack,pass\n")
        for name, (t, c) in rows:
            fh.write(",".join([name] + [format(float(v), ".17g") for v in
                                        (t, c.r0, c.r1, c.sigma, c.f0, c.f1, c.slack)]
                              + [str(int(c.passed))]) + "\n")
    man.outputs.append(write)
    man.details.update(checks=len(rows), failures=total_fail)
    if rows and not any(c.applicable for _, (_, c) in rows):
        man.details["reason"] = rows[0][1][1].reason
        return INAPPLICABLE
    return _flag(total_fail == 0 and bool(rows))


VERIFIERS = {"thm1": verify_thm1, "thm2": verify_thm2, "sec4": verify_sec4, "decay-lemma": verify_decay}


def cmd_verify(args, man: RunManifest):
    man.config.update(theorem=args.theorem, n=args.n, auto=args.auto)
    if args.theorem != "decay-lemma" and not args.auto:
        raise UsageError(f"verify {args.theorem} runs its own pipeline: pass --auto")
    if args.theorem == "decay-lemma" and not (args.auto or args.input):
        raise UsageError("verify decay-lemma needs --auto or --input PROFILE")
    out = _out_dir(args)
    return VERIFIERS[args.theorem](args, out, man)


# converge

def cmd_converge(args, man: RunManifest):
    try:
        grids = tuple(int(g) for g in args.grids.split(","))
    except ValueError as exc:
        raise UsageError(f"bad --grids: {exc}") from exc
    man.config.update(fixture=args.fixture, grids=grids)
    res = run_fixture(args.fixture, grids)
    out = _out_dir(args)
    orders = [math.nan] + [float(o) for o in res.orders] if res.orders else [math.nan] * len(grids)
    man.outputs.append(write_csv(out / "convergence.csv", ["N", "error", "order"],
                                 [res.grids, res.errors, orders]))
    man.details.update(order=res.order, skipped=res.skipped, monotone=res.monotone)
    if res.skipped:
        return _flag(max(res.errors) < 1e-10)
    return _flag(res.monotone and 1.8 <= res.order <= 2.2)


# entry point

def build_parser():
    p = argparse.ArgumentParser(prog="heatlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct an initial datum and check admissibility")
    b.add_argument("kind", choices=("V", "W", "thm2", "twopoint"))
    b.add_argument("--n", type=int, default=2)
    b.add_argument("--rho", type=float, default=1.25)
    b.add_argument("--eps", type=float, default=0.05)
    b.add_argument("--kappa", type=float)
    b.add_argument("--r0", type=float, default=1.25)
    b.add_argument("--r1", type=float, default=1.5)
    b.add_argument("--nr", type=int, default=513)
    b.add_argument("--ntheta", type=int, default=513)
    b.add_argument("--out", default="heatlab-build")

    e = sub.add_parser("evolve", help="evolve a datum and run the monitors")
    e.add_argument("--input")
    e.add_argument("--fixture", choices=("steady",))
    e.add_argument("--n", type=int, default=2)
    e.add_argument("--config")
    e.add_argument("--scheme", choices=("trapezoidal", "backward"))
    e.add_argument("--dt", type=float)
    e.add_argument("--t_final", "--t-final", dest="t_final", type=float)
    e.add_argument("--nr", type=int)
    e.add_argument("--ntheta", type=int)
    e.add_argument("--startup_steps", "--startup-steps", dest="startup_steps", type=int)
    e.add_argument("--snapshots")
    e.add_argument("--out", default="heatlab-evolve")

    v = sub.add_parser("verify", help="run a verification pipeline")
    v.add_argument("theorem", choices=tuple(VERIFIERS))
    v.add_argument("--auto", action="store_true")
    v.add_argument("--input")
    v.add_argument("--n", type=int, default=2)
    v.add_argument("--eps", type=float, default=0.05)
    v.add_argument("--out", default="heatlab-verify")

    c = sub.add_parser("converge", help="observed order of accuracy on an oracle fixture")
    c.add_argument("--fixture", choices=FIXTURES, default="sine")
    c.add_argument("--grids", default=",".join(str(g) for g in GRIDS))
    c.add_argument("--out", default="heatlab-converge")
    return p


COMMANDS = {"build": cmd_build, "evolve": cmd_evolve, "verify": cmd_verify, "converge": cmd_converge}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    name = args.command if args.command != "verify" else f"verify {args.theorem}"
    if args.command == "build":
        name = f"build {args.kind}"
    man = RunManifest(name)
    start = time.perf_counter()
    try:
        code = COMMANDS[args.command](args, man)
    except UsageError as exc:
        print(f"heatlab: error: {exc}", file=sys.stderr)
        return USAGE
    man.verdict = VERDICTS[code]
    man.wall_time = time.perf_counter() - start
    path = man.write(args.out)
    print(f"{name}: {man.verdict} ({man.wall_time:.2f} s) -> {path}")
    for w in man.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
