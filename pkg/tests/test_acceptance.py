"""Acceptance criteria 1-9, one pass/fail line each at the pinned tolerances.

Run with ``pytest tests/test_acceptance.py -v``; the lines are printed even
under output capture.
"""

import time

import numpy as np
import pytest

from heatlab.analysis import (decay_lattice, monitor_proposition, run_section4, run_theorem1,
                              run_theorem1_control, run_theorem2)
from heatlab.analysis.theorem1 import default_config
from heatlab.fixtures import run_fixture, sine_error, steady_error
from heatlab.initial_data import (ODESolveParams, check_admissible, combine_u0, laplacian_lower_bound_check,
                                  make_g, make_h, make_u0_twopoint, make_V, make_W, solve_vR,
                                  vR_closed_form_n2)
from heatlab.pde_solver import SolverConfig, evolve_meridian, evolve_radial, steady_state
from heatlab.profiles import MeridianField

ROUNDING_FLOOR = 1e-12


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} | {detail}")
        return ok
    return emit


def test_criterion_1_theorem1_witness(report):
    start = time.perf_counter()
    res = run_theorem1(2, default_config())
    elapsed = time.perf_counter() - start
    wit = res.witness
    if wit is None:
        detail = "no witness; " + "; ".join(res.notes)
    else:
        detail = (f"t0 = {wit.t0:.4g}, margin = {wit.margin:.3e}, budget = {wit.error_budget:.3e}, "
                  f"conditions = {res.state.conditions_hold}")
    ok = res.passed and elapsed <= 300
    report(1, ok, f"{detail}; {elapsed:.1f} s")
    assert wit is not None, "no ConvexityWitness"
    assert wit.t0 > 0 and wit.margin >= wit.error_budget
    assert res.state.conditions_hold
    assert elapsed <= 300


def test_criterion_2_theorem1_control(report):
    res = run_theorem1_control(2, default_config())
    ok = res.passed
    report(2, ok, f"triples found = {res.triples_found}, pair scans = {res.scans}, "
                  f"witnesses = {len(res.witnesses)}")
    assert res.triples_found == 0
    assert not res.witnesses


def test_criterion_3_theorem2(report):
    start = time.perf_counter()
    res = run_theorem2(2)
    elapsed = time.perf_counter() - start
    f2 = res.formula.f_second
    ok = res.passed and elapsed <= 60
    report(3, ok, f"u0'' = {res.u0_second:.6f}, f'' formula = {f2:.6f}, identity error = "
                  f"{res.identity_error:.2e}, f'' fd = {res.fd_f_second:.6f} "
                  f"(gap {res.fd_relative_gap:.2%}); {elapsed:.1f} s")
    assert res.u0_second >= 0.099
    assert res.identity_error <= 1e-6
    assert f2 <= -0.99
    assert res.fd_relative_gap <= 0.02
    assert elapsed <= 60


def test_criterion_4_two_point_H(report):
    start = time.perf_counter()
    res = run_section4(0.05, 2)
    elapsed = time.perf_counter() - start
    b = res.best
    ok = res.passed and elapsed <= 120
    report(4, ok, f"u0(1 + eps/2) = {res.level:.5f}, max H = {b.H:.5f} at t = {b.t:.4g}, "
                  f"refined H = {res.refined_H:.5f}; {elapsed:.1f} s")
    assert 0.70 <= res.level <= 0.80
    assert b.H > 0 and b.t > 0
    assert res.refined_H is not None and res.refined_H > 0
    assert elapsed <= 120


def test_criterion_5_decay_lemma(report, v54_flow, twopoint_flow):
    counts = {}
    for name, fld in (("V_5/4", v54_flow), ("twopoint", twopoint_flow)):
        checks, failures = decay_lattice(fld)
        counts[name] = (len(checks), len(failures), sum(not c.applicable for _, c in checks))
    ok = all(f == 0 and c == 45 * 20 for c, f, _ in counts.values())
    report(5, ok, ", ".join(f"{k}: {c} checks, {f} failures ({i} inapplicable)"
                            for k, (c, f, i) in counts.items()))
    for c, f, i in counts.values():
        assert c == 45 * 20
        assert f == 0


def test_criterion_6_monitors(report, v54_flow, twopoint_flow):
    V = make_V(2, 1.25)
    bump = make_W(2, 1.25, 1.5, 0.05, nr=129, ntheta=129)
    cfg = SolverConfig(nr=129, ntheta=129, t_final=0.5, snapshots=tuple(np.linspace(0.025, 0.5, 20)))
    fixtures = {
        "V_5/4": v54_flow,
        "twopoint": twopoint_flow,
        "W": evolve_meridian(bump.field, 2, cfg),
        "(1-eps)V+eps W": evolve_meridian(combine_u0(0.3, V, bump), 2, cfg),
        "V_5/4 n=3 meridian": evolve_meridian(MeridianField.from_radial(make_V(3, 1.25), 129, 33), 3,
                                              cfg.with_(ntheta=33)),
    }
    counts = {k: len(monitor_proposition(f).violations) for k, f in fixtures.items()}
    ok = not any(counts.values())
    report(6, ok, ", ".join(f"{k}: {v} violations" for k, v in counts.items()))
    assert not any(counts.values())


def test_criterion_7_solver(report):
    sine = run_fixture("sine")
    err512 = sine_error(512)
    drift = steady_error(257)
    h = make_h()
    v = solve_vR(ODESolveParams(100.0, 2, 4097), h)
    exact, _, _ = vR_closed_form_n2(100.0, h, v.r)
    vr_err = float(np.abs(exact - v.values).max())
    parts = {
        "order": 1.8 <= sine.order <= 2.2,
        "sup error": err512 < 1e-6,
        "steady": drift < 1e-10,
        "v_R": vr_err < 1e-8,
    }
    report(7, all(parts.values()),
           f"orders = {[round(float(o), 3) for o in sine.orders]}, sup error at 512 = {err512:.4e} "
           f"(< 1e-6: {parts['sup error']}), steady drift = {drift:.1e}, v_R error = {vr_err:.1e}")
    assert parts["order"]
    assert parts["steady"]
    assert parts["v_R"]
    assert parts["sup error"], f"sup error {err512:.4e} at 512 points is not below 1e-6"


def test_criterion_8_long_time(report):
    u0 = make_u0_twopoint(0.05, 2)
    times = tuple(float(t) for t in np.arange(0.5, 20.01, 0.5))
    fld = evolve_radial(u0, 2, SolverConfig(nr=1025, dt=2e-3, t_final=20.0, snapshots=times))
    u_inf = steady_state(2)(fld.r)
    dist = np.array([np.abs(fld.values[k] - u_inf).max() for k in range(1, len(fld.times))])
    below = np.nonzero(dist < 1e-3)[0]
    T = float(fld.times[1 + below[0]]) if below.size else None
    # strictly decreasing until the distance reaches rounding, then it stays there
    floor_hits = np.nonzero(dist <= ROUNDING_FLOOR)[0]
    k = int(floor_hits[0]) if floor_hits.size else len(dist) - 1
    decreasing = bool(np.all(np.diff(dist[:k + 1]) < 0))
    settled = bool(np.all(dist[k + 1:] <= ROUNDING_FLOOR))
    ok = T is not None and T <= 20 and decreasing and settled
    report(8, ok, f"first T with sup|u - u_inf| < 1e-3: {T}, distance at T = 20: {dist[-1]:.1e}, "
                  f"monotone to the rounding floor: {decreasing and settled}")
    assert T is not None and T <= 20
    assert decreasing and settled


def test_criterion_9_admissibility(report):
    bound_ok, worst = laplacian_lower_bound_check(make_V(2, 1.25), 2, 1.25, samples=4096)
    g = make_g(0.05, 2)
    V = make_V(2, 1.25)
    W = make_W(2, 1.25, 1.5, 0.05, nr=129, ntheta=129)
    inputs_pass = check_admissible(V).passed and check_admissible(W).passed
    combos = [check_admissible(combine_u0(e, V, W)).passed for e in (0.0, 0.1, 0.5, 0.9, 1.0)]
    ok = bound_ok and abs(g.residual) < 1e-10 and inputs_pass and all(combos)
    report(9, ok, f"V bound worst slack = {worst:.2e}, g residual = {g.residual:.1e}, "
                  f"combinations admissible = {sum(combos)}/{len(combos)}")
    assert bound_ok
    assert abs(g.residual) < 1e-10
    assert inputs_pass and all(combos)
