"""Solver sanity checks against closed forms.

A single sine mode on [0, 1] decays like exp(-pi^2 t), so the error of the
finite-difference run can be measured exactly.  Doubling the grid should
cut it by four.  The harmonic profile u_inf should not move at all.
"""

from heatlab.fixtures import run_fixture, steady_error

print("sine mode on [0, 1], t = 0.1, dt = 1e-4")
res = run_fixture("sine")
for N, err in zip(res.grids, res.errors):
    print(f"  N = {N:4d}   sup error = {err:.4e}")
print(f"  observed orders: {', '.join(f'{float(o):.3f}' for o in res.orders)}")

# the three-point stencil leaves about 0.30 h^2 here, so 512 nodes sit just above 1e-6
print(f"  0.3025 / 511^2 = {0.3025 / 511 ** 2:.4e}")

print("\nu_inf on (1, 2), n = 2: largest change over one step up to t = 1")
print(f"  {steady_error(257):.2e}")

print("\nmeridian (ADI) solver on radial data against a fine radial run")
mer = run_fixture("meridian", (64, 128, 256))
for N, err in zip(mer.grids, mer.errors):
    print(f"  nr = {N:4d}   sup error = {err:.3e}")
print(f"  observed order: {mer.order:.3f}")
