"""
Working from a presentation file
================================

Any two-generator, one-relator presentation with peripheral data can be
loaded from JSON. Without a closed-form family the library finds a
representation by Newton's method and traces the arc by continuation.
Here we feed it the trefoil with the relator inverted and compare.
"""

import json
import tempfile

import numpy as np

from su2torsion import (ONE, TREFOIL_DOCUMENT, find_representation, integrate_path,
                        load_presentation, trace_path)

doc = dict(TREFOIL_DOCUMENT, relators=["yyyXX"])
with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    json.dump(doc, fh)
pres = load_presentation(fh.name)
print("relator signs:", pres.relator_signs)

# %%
# Find an irreducible point and continue it in both directions until the
# arc runs into the reducible characters.

seed = find_representation(pres, np.random.default_rng(1))
path = trace_path(pres, seed)
print("traced domain:", path.domain)

# %%
# The traced arc stops a little short of the reducible ends, so the integral
# is slightly below 4 pi / 3.

print("total over the traced arc:", integrate_path(pres, path, ONE, epsrel=1e-8))
print("4 pi / 3                 :", 4 * np.pi / 3)
