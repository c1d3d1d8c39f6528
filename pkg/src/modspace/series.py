"""Real-entire nonlinearities F(s, t) = sum a_{mn} s^m t^n as finite truncations.

Series act on complex fields through F(Re f, Im f).  The coefficientwise
absolute-value majorant drives every norm certificate: composition norms are
bounded by the majorant evaluated at the norms of the real and imaginary
parts, and Lipschitz constants by the derivative majorants at the summed
norms.  Genuinely infinite entire functions enter as user-chosen truncations;
:func:`majorant_tail_bound` reports the discarded mass on a radius.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .grid import SampledField, imag_part, real_part, subtract
from .norms import ModParams, mod_norm, mod_norm_many

__all__ = [
    "RealEntireSeries",
    "preset_series",
    "PRESETS",
    "norm_certificate",
    "lipschitz_bound",
    "CompositionCertificate",
    "LipschitzBound",
    "majorant_tail_bound",
]


@dataclass(frozen=True, eq=False)
class RealEntireSeries:
    """Truncated double power series with coefficient matrix ``table``.

    ``table[m, n]`` is the coefficient of s^m t^n.  Construct via
    :meth:`from_coeffs` ({(m, n): a_mn}) or :meth:`from_json`.
    """

    table: np.ndarray

    def __post_init__(self):
        t = np.atleast_2d(np.asarray(self.table, dtype=np.complex128))
        if t.ndim != 2:
            raise ValueError("coefficient table must be two-dimensional")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @classmethod
    def from_coeffs(cls, coeffs: dict) -> "RealEntireSeries":
        if not coeffs:
            return cls(np.zeros((1, 1)))
        ms = max(m for m, _ in coeffs) + 1
        ns = max(n for _, n in coeffs) + 1
        table = np.zeros((ms, ns), dtype=np.complex128)
        for (m, n), a in coeffs.items():
            if m < 0 or n < 0:
                raise ValueError(f"negative exponent pair {(m, n)}")
            table[m, n] = a
        return cls(table)

    @classmethod
    def from_json(cls, text) -> "RealEntireSeries":
        """Parse {"coeffs": [[m, n, re, im], ...]}."""
        data = json.loads(text) if isinstance(text, (str, bytes)) else text
        coeffs = {}
        for m, n, re, im in data["coeffs"]:
            coeffs[(int(m), int(n))] = complex(re, im)
        return cls.from_coeffs(coeffs)

    def to_json(self) -> str:
        rows = [
            [m, n, self.table[m, n].real, self.table[m, n].imag]
            for m in range(self.table.shape[0])
            for n in range(self.table.shape[1])
            if self.table[m, n] != 0
        ]
        return json.dumps({"coeffs": rows})

    @property
    def coeffs(self) -> dict:
        out = {}
        idx = np.argwhere(self.table != 0)
        for m, n in idx:
            out[(int(m), int(n))] = complex(self.table[m, n])
        return out

    @property
    def degree(self) -> int:
        idx = np.argwhere(self.table != 0)
        if idx.size == 0:
            return 0
        return int((idx[:, 0] + idx[:, 1]).max())

    @property
    def is_zero(self) -> bool:
        return not np.any(self.table)

    @property
    def constant_free(self) -> bool:
        return self.table[0, 0] == 0

    def require_constant_free(self, what: str) -> "RealEntireSeries":
        if not self.constant_free:
            raise ValueError(f"{what} requires a vanishing constant term (F(0) = 0)")
        return self

    def evaluate(self, s, t):
        """F(s, t); accepts scalars or broadcasting arrays."""
        return npoly.polyval2d(np.asarray(s), np.asarray(t), self.table)

    def __call__(self, s, t):
        return self.evaluate(s, t)

    def majorant(self) -> "RealEntireSeries":
        """Series with coefficients |a_mn|; monotone on [0, inf)^2."""
        return RealEntireSeries(np.abs(self.table))

    def partial_x(self) -> "RealEntireSeries":
        """Term-by-term d/ds."""
        return RealEntireSeries(npoly.polyder(self.table, axis=0))

    def partial_y(self) -> "RealEntireSeries":
        return RealEntireSeries(npoly.polyder(self.table, axis=1))

    def compose(self, f: SampledField) -> SampledField:
        """Pointwise F(Re f, Im f) on the lattice."""
        if f.domain != "space":
            raise ValueError("compose expects a space-domain field")
        vals = self.evaluate(f.values.real, f.values.imag)
        return SampledField(f.grid, np.asarray(vals, dtype=np.complex128), "space")

    def g_factor(self) -> npoly.Polynomial:
        """G with F_majorant(x, x) = x G(x); needs a constant-free series.

        G has the nonnegative coefficients c_k = sum_{m+n=k} |a_mn| shifted
        down one degree, so it is monotone increasing on [0, inf).
        """
        self.require_constant_free("g_factor")
        mags = np.abs(self.table)
        kmax = sum(mags.shape) - 2
        c = np.zeros(kmax + 1)
        for m in range(mags.shape[0]):
            for n in range(mags.shape[1]):
                c[m + n] += mags[m, n]
        return npoly.Polynomial(c[1:]) if kmax >= 1 else npoly.Polynomial([0.0])

    def derivative_majorant_sum(self, x: float, y: float) -> float:
        """(majorant of dF/ds + majorant of dF/dt) evaluated at (x, y) >= 0."""
        dx = self.partial_x().majorant()
        dy = self.partial_y().majorant()
        return float(np.real(dx(x, y) + dy(x, y)))


PRESETS = {
    # (s^2+t^2)(s+it): the modulus-squared-times-identity cubic surrogate
    "cubic": {(3, 0): 1.0, (2, 1): 1j, (1, 2): 1.0, (0, 3): 1j},
    "quadratic": {(2, 0): 1.0, (0, 2): 1.0},
    # (s^2+t^2)^2 (s+it)
    "quintic": {(5, 0): 1.0, (4, 1): 1j, (3, 2): 2.0, (2, 3): 2j, (1, 4): 1.0, (0, 5): 1j},
}


def preset_series(name: str) -> RealEntireSeries:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return RealEntireSeries.from_coeffs(PRESETS[name])


@dataclass(frozen=True)
class CompositionCertificate:
    lhs: float
    rhs: float
    constant: float


@dataclass(frozen=True)
class LipschitzBound:
    lhs: float
    rhs: float
    constant: float


def norm_certificate(
    F: RealEntireSeries, f: SampledField, params: ModParams, window=None
) -> CompositionCertificate:
    """Measured two sides of the composition estimate.

    lhs is the norm of F(f); rhs the majorant at the norms of Re f and Im f.
    The quotient is the empirical constant that the multiplication-algebra
    inequality controls (up to C^{degree-1} after iterating products).
    """
    F.require_constant_free("norm_certificate")
    lhs = mod_norm(F.compose(f), params, window=window)
    n_re, n_im = mod_norm_many([real_part(f), imag_part(f)], params, window=window)
    rhs = float(np.real(F.majorant()(n_re, n_im)))
    constant = lhs / rhs if rhs > 0 else 0.0
    return CompositionCertificate(lhs=lhs, rhs=rhs, constant=constant)


def lipschitz_bound(
    F: RealEntireSeries, u: SampledField, v: SampledField, params: ModParams, window=None
) -> LipschitzBound:
    """Measured difference estimate: ||F(u)-F(v)|| against the mean-value bound

        2 ||u - v|| (dF/ds-majorant + dF/dt-majorant)(||u||+||v||, ||u||+||v||).
    """
    F.require_constant_free("lipschitz_bound")
    lhs = mod_norm(subtract(F.compose(u), F.compose(v)), params, window=window)
    nu, nv, ndiff = mod_norm_many([u, v, subtract(u, v)], params, window=window)
    total = nu + nv
    rhs = 2.0 * ndiff * F.derivative_majorant_sum(total, total)
    constant = lhs / rhs if rhs > 0 else 0.0
    return LipschitzBound(lhs=lhs, rhs=rhs, constant=constant)


def majorant_tail_bound(coeff_fn, degree: int, radius: float, max_terms: int = 400) -> float:
    """Tail sum_{m+n > degree} |a_mn| R^{m+n} for a coefficient rule.

    ``coeff_fn(m, n)`` supplies the full series; summation stops when a whole
    diagonal contributes below 1e-300 relative mass or ``max_terms`` diagonals
    were added.  Reported alongside truncations of infinite entire series.
    """
    total = 0.0
    quiet = 0
    for k in range(degree + 1, degree + 1 + max_terms):
        diag = sum(abs(coeff_fn(m, k - m)) for m in range(k + 1))
        term = diag * radius**k
        total += term
        # parity-sparse series have empty diagonals; stop only after two
        # consecutive negligible ones
        quiet = quiet + 1 if term <= 1e-17 * max(total, 1e-300) else 0
        if quiet >= 2:
            break
    return total
