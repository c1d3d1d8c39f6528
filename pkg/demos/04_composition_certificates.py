"""Power-series nonlinearities, their majorants, and norm certificates.

A constant-free series F acting pointwise through F(Re f, Im f) obeys
|F(f)| <= F_maj(|Re f|, |Im f|) in norm, up to a measured constant; the
difference F(u) - F(v) is controlled by the derivative majorants.  Infinite
entire series enter as truncations with a reported tail bound.
"""

import math

import numpy as np

from modspace.grid import GridSpec, sample_builtin, scale
from modspace.norms import ModParams
from modspace.series import (
    RealEntireSeries, lipschitz_bound, majorant_tail_bound, norm_certificate, preset_series,
)

grid = GridSpec(1, 512, 32.0)
params = ModParams(1, 1, 0)
f = sample_builtin("gaussian", grid)

for name in ("quadratic", "cubic", "quintic"):
    F = preset_series(name)
    cert = norm_certificate(F, f, params)
    print(f"{name}: |F(f)| = {cert.lhs:.4f} <= {cert.constant:.4f} * majorant({cert.rhs:.4f})")

# the cubic surrogate acts like |f|^2 f pointwise
cubic = preset_series("cubic")
direct = np.abs(f.values) ** 2 * f.values
print("cubic compose == |f|^2 f:", np.abs(cubic.compose(f).values - direct).max())

# Lipschitz control between two amplitudes
u, v = scale(f, 1.0), scale(f, 0.8)
rec = lipschitz_bound(cubic, u, v, params)
print(f"|F(u)-F(v)| = {rec.lhs:.5f} <= {rec.constant:.4f} * bound({rec.rhs:.4f})")

# truncating an entire series: (e^{rho(s^2+t^2)} - 1)(s + i t) up to degree 9,
# with the discarded majorant mass reported on a radius
rho = 0.5


def coeff(m, n):
    # coefficient of s^m t^n in (e^{rho(s^2+t^2)} - 1)(s + i t)
    total = 0.0 + 0.0j
    for a in range(0, m + 1):
        for b in range(0, n + 1):
            if a + b == 0:
                continue
            base = rho ** (a + b) / (math.factorial(a) * math.factorial(b))
            if (m, n) == (2 * a + 1, 2 * b):
                total += base
            if (m, n) == (2 * a, 2 * b + 1):
                total += 1j * base
    return total


degree = 9
table = {
    (m, n): coeff(m, n)
    for m in range(degree + 1)
    for n in range(degree + 1 - m)
    if coeff(m, n) != 0
}
F = RealEntireSeries.from_coeffs(table)
tail = majorant_tail_bound(coeff, degree, radius=1.0)
cert = norm_certificate(F, scale(f, 0.5), params)
print(f"exp-type truncation: degree {degree}, tail mass at R=1: {tail:.2e}, "
      f"certificate constant {cert.constant:.4f}")
