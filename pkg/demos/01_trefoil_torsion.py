"""
Torsion along the trefoil character variety
===========================================

The irreducible SU(2) characters of the trefoil form an open arc. Along it we
compute the torsion form, look at the two determinants it is built from, and
integrate it.
"""

import numpy as np

from su2torsion import ONE, TrefoilPath, builtin, integrate_path, tangent_cocycle, torsion_at

trefoil = builtin("trefoil")
path = TrefoilPath()
print("relator:", trefoil.spell(trefoil.relators[0]), " meridian:", trefoil.spell(trefoil.meridian))

# %%
# The torsion at a few points. ``volume_det`` measures the tangent vector
# against the cohomology volume, ``r_pseudodet`` is the pseudo-determinant of
# the relator Jacobian; both equal 6 sin t on this arc.

print(f"{'t':>5} {'tau':>10} {'6 sin t':>10} {'volume_det':>11} {'r_pseudodet':>12}")
for t in (0.3, 0.8, np.pi / 2, 2.4, 3.0):
    b = torsion_at(trefoil, path.point(t, trefoil), tangent_cocycle(trefoil, path, t))
    print(f"{t:5.3f} {b.value:10.6f} {6 * np.sin(t):10.6f} {b.volume_det:11.6f} {b.r_pseudodet:12.6f}")

# %%
# Closed form for comparison.

s, c = np.sin(np.pi / 3), np.cos(np.pi / 3)
t = 1.0
print("closed form at t=1:", 2 * s * np.sin(t) / np.sqrt(c ** 2 + s ** 2 * np.sin(t) ** 2))

# %%
# Integrating the constant function 1 gives the total torsion, 4 pi / 3.

total = integrate_path(trefoil, path, ONE)
print(f"total torsion {total:.15f}   4pi/3 = {4 * np.pi / 3:.15f}")
