"""Weighted mixed norms as measuring instruments.

Shows the Gaussian norm oracles, the exact transform invariance of the p = q
norms (and how an s > 0 weight breaks it), embedding constants, the torus
coefficient-sum norm, and the weighted-L2 membership test.
"""

import numpy as np

from modspace.grid import GridSpec, SampledField, fourier_image, sample_builtin
from modspace.norms import (
    ModParams, l2s_membership, mod_norm, periodization_spectrum, torus_algebra_norm,
)

grid = GridSpec(1, 512, 32.0)
g = sample_builtin("gaussian", grid)

print("Gaussian (1,1,0) norm:", mod_norm(g, ModParams(1, 1, 0)), "(sqrt 2 =", np.sqrt(2), ")")
print("Gaussian (2,2,0) norm:", mod_norm(g, ModParams(2, 2, 0)), "(2^-1/2 =", 2**-0.5, ")")

for name in ("gaussian", "triangle", "jump"):
    f = sample_builtin(name, grid)
    for s in (0.0, 1.0):
        params = ModParams(1, 1, s)
        ratio = mod_norm(fourier_image(f), params) / mod_norm(f, params)
        print(f"  {name}: |f^|/|f| at s={s}: {ratio:.6f}")

# torus instruments on 1-periodic content
x = grid.axis()
cosf = SampledField(grid, np.cos(2 * np.pi * x))
print("coefficient-sum norm of cos(2 pi x):", torus_algebra_norm(cosf))
print("its spectrum:", {k: round(abs(v), 6) for k, v in periodization_spectrum(cosf, 2).items()})

# membership test: both weighted L2 norms must be finite and stable
for name, s in (("gaussian", 2.0), ("triangle", 1.2), ("triangle", 2.0), ("jump", 2.0)):
    rep = l2s_membership(sample_builtin(name, grid), s)
    print(f"{name} at s={s}: certified={rep.certified} "
          f"(freq-norm change under refinement {rep.change_freq:.1%})")
