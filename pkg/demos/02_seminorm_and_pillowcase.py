"""
Peripheral functions, the seminorm and the pillowcase
=====================================================

Symmetric Laurent polynomials in the longitude and meridian eigenvalues are
written as ``c:p:q`` terms, each meaning c (l^p m^q + l^-p m^-q). Integrating
them against the torsion gives a seminorm whose null functions contain the
A-ideal of the knot.
"""

import numpy as np

from su2torsion import (PeripheralFunction, TrefoilPath, a_ideal_residual, builtin, restrict,
                        seminorm)

trefoil = builtin("trefoil")
path = TrefoilPath()

# %%
# The two generators vanish identically on the arc, so their seminorm is zero
# to quadrature precision. l m^6 does not vanish: it equals -1 there.

for spec in ("1:1:0,1:0:6", "1:1:1,1:0:5", "1:1:6", "1:0:0"):
    f = PeripheralFunction.parse(spec)
    print(f"{spec:>14}  ||f||_s = {seminorm(trefoil, path, f):.3e}")

# %%
# l + 1/l is not in the ideal, yet its integral against the torsion cancels
# exactly, so its seminorm is zero as well. Its square has a nonzero seminorm.

print("||l + 1/l||_s     =", seminorm(trefoil, path, PeripheralFunction.parse("1:1:0")))
print("||(l + 1/l)^2||_s =", seminorm(trefoil, path, PeripheralFunction.parse("1:2:0,1:0:0")))

# %%
# Restricting to the boundary torus gives points (theta_l, theta_m) of the
# pillowcase. On the trefoil image theta_l + 6 theta_m = pi mod 2 pi.

ts = np.linspace(0.2, np.pi - 0.2, 7)
for t in ts:
    pt = restrict(trefoil, path.images(t))
    print(f"t={t:4.2f}  theta_l={pt.theta_l:+.4f}  theta_m={pt.theta_m:.4f}  "
          f"cos(theta_l + 6 theta_m) = {np.cos(pt.theta_l + 6 * pt.theta_m):+.12f}")

# %%
# Residuals of candidate ideal generators over a sample of the arc.

sample = [path.point(t) for t in np.linspace(0.01, np.pi - 0.01, 200)]
cands = [PeripheralFunction.parse(s) for s in ("1:1:0,1:0:6", "1:1:1,1:0:5", "1:1:0")]
for f, r in zip(cands, a_ideal_residual(trefoil, cands, sample)):
    print(f"{f.spell():>22}  max residual {r:.2e}")
