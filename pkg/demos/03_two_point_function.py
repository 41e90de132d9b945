"""The two-point function H on a radial flow.

x sits at 1 + eps/2 at time 0.  For each later snapshot y(t) is the
point on the same ray with the same value of u.  H is positive somewhere
along this path although u0 has convex superlevel sets, so H does not obey
a maximum principle on the parabolic boundary.
"""

from heatlab.analysis import run_section4

res = run_section4(0.05, 2)
print(f"level u0(1 + eps/2) = {res.level:.5f}")
print(f"steady radius 1 + gamma = {1 + res.gamma:.5f}")
print("   t        y1        H")
for t, y, H in list(zip(res.trace_t, res.trace_y1, res.trace_H))[::20]:
    print(f"{t:6.2f}  {y:.5f}  {H: .5f}")
b = res.best
print(f"\nmax H = {b.H:.5f} at t = {b.t:g}, y1 = {b.y.coords[0]:.5f}")
print(f"on the once-refined grid: H = {res.refined_H:.5f}")
