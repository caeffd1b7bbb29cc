"""
The global Monte-Carlo formula
==============================

The total torsion can also be recovered without ever parametrizing the
character variety: integrate a kernel concentrated on the representation
variety over SU(2)^k and let the concentration parameter lambda grow.

Sample sizes here are small so the script finishes in under a minute on one
core; the acceptance suite uses two million samples per lambda.
"""

import numpy as np

from su2torsion import ONE, KernelParams, TrefoilPath, builtin
from su2torsion import globalformula as gf

trefoil = builtin("trefoil")
path = TrefoilPath()
target = 4 * np.pi / 3

# %%
# Plain Haar sampling works at small lambda, where the kernel is wide.

haar = gf.global_estimate(trefoil, ONE, KernelParams(30.0), "haar", 200_000, seed=1, workers=1)
tube = gf.global_estimate(trefoil, ONE, KernelParams(30.0), "tube", 50_000, seed=2, path=path,
                          workers=1)
print(f"lambda=30  haar {haar.value:.4f} +- {haar.std_error:.4f}   "
      f"tube {tube.value:.4f} +- {tube.std_error:.4f}")

# %%
# For large lambda the tube sampler draws points near the conjugation orbits
# of the arc. Both kernels are evaluated on the same samples.

sweep = gf.sweep_estimates(trefoil, ONE, [200.0, 400.0, 800.0], kernels=gf.KERNELS, n=50_000,
                           seed=0, path=path, workers=1)
for kernel, res in sweep.items():
    for e in res["estimates"]:
        print(f"{kernel:>10} lambda={e.lam:5.0f}  {e.value:.4f} +- {e.std_error:.4f}")
    fit = res["fit"]
    print(f"{kernel:>10} extrapolated {fit.extrapolated:.4f} +- {fit.std_error:.4f} "
          f"(4pi/3 = {target:.4f})")

# %%
# Which overall constant matches? Each candidate is the ratio it would produce.

fit = sweep["parametrix"]["fit"]
for name, ratio in gf.normalization_verdict(fit.extrapolated, target, trefoil.k).items():
    print(f"{name:>40}: {ratio:8.4f}")
