"""Searching for a non-convex superlevel set of (1 - eps) v + eps w.

v evolves the radial profile V_{5/4} and w the stretched bump W.  The
search needs a time t0 where alpha = v(X)/s has dropped below 1/2 while
beta = w(Z) is still below sigma s / 2.  Here s is the value of W on the
inner ellipsoid.  This prints the quantities that decide it.
"""

import numpy as np

from heatlab.analysis import run_theorem1

res = run_theorem1(2)
print(f"kappa = {res.kappa:g}")
if res.etas is not None:
    e = res.etas
    print(f"eta1 = {e.eta1}, eta2 = {e.eta2:.4f}, s = {e.s:.3e}, sigma = {e.sigma:.3e}")
    t = e.triple
    print(f"X = {np.round(t.X.coords, 4)}, Y = {np.round(t.Y.coords, 4)}, Z = {np.round(t.Z.coords, 4)}")
if res.state is not None:
    st = res.state
    target = st.sigma * st.s / 2
    print("     t        alpha        beta   beta < sigma s/2")
    for k in range(0, len(st.times), 5):
        print(f"{st.times[k]:.2e}  {st.alpha[k]:.3e}  {st.beta[k]:.3e}  {st.beta[k] < target}")
for note in res.notes:
    print("note:", note)
print("verdict:", "pass" if res.passed else "fail")
