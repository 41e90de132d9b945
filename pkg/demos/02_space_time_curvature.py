"""Curvature of a level graph t = f(r) at the initial time.

The datum is flat-topped: its Laplacian equals 1/10 on a band around
R + 1/2 and it is built from a smooth transition h.  On the level through
R + 1/2 the curvature formula gives f'' = -10 u0'', which is negative, so
the space-time superlevel set is not convex there.  A direct evolution and
a quadratic fit of the computed level graph should agree with it.
"""

from heatlab.analysis import run_theorem2

res = run_theorem2(2)
r0 = res.R + 0.5
print(f"R = {res.R:g}, r0 = R + 1/2 = {r0:g}")
print(f"u0''(r0)             = {res.u0_second:.6f}")
print(f"f'(r0)  formula      = {res.formula.f_prime:.6f}")
print(f"f''(r0) formula      = {res.formula.f_second:.6f}")
print(f"-10 u0''(r0)         = {-10 * res.u0_second:.6f}")
print(f"f'(r0)  level graph  = {res.fd_f_prime:.6f}")
print(f"f''(r0) level graph  = {res.fd_f_second:.6f}  (relative gap {res.fd_relative_gap:.2%})")
print(f"level graph: {len(res.graph.r)} nodes, t up to {res.graph.f.max():.3e}")
print("verdict:", "pass" if res.passed else "fail")
