"""Fourier multiplier propagators for the free Schrodinger, wave and
Klein-Gordon flows, plus empirical verification of their norm-growth bounds.

The five symbols (with r = |xi|):

    schrodinger   exp(-i t 4 pi^2 r^2)
    wave_sine     sin(2 pi t r) / (2 pi r)        (-> t at r = 0)
    wave_cosine   cos(2 pi t r)
    kg_sine       sin(t (1 + |2 pi xi|^2)^(1/2)) / (1 + |2 pi xi|^2)^(1/2)
    kg_cosine     cos(t (1 + |2 pi xi|^2)^(1/2))

wave_sine is evaluated through numpy's sinc, which is a stable series
evaluation near the removable singularity at the origin bin.  Norm-growth
ratios are measured as battery maxima, which lower-bound the operator norm;
the expected envelope is (1 + t^2)^(dim/4) with an unspecified constant, so
reports assert boundedness and trend only, never a particular constant.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import GridSpec, SampledField, _backward_values, _forward_values
from .norms import ModParams, mod_norm

__all__ = ["FAMILIES", "PropagatorKind", "symbol", "apply", "bound_ratio", "BoundRatioReport"]

FAMILIES = ("schrodinger", "wave_sine", "wave_cosine", "kg_sine", "kg_cosine")


@dataclass(frozen=True)
class PropagatorKind:
    family: str
    t: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown propagator family {self.family!r}; choose from {FAMILIES}")
        object.__setattr__(self, "t", float(self.t))


def _symbol_from_radius(family: str, t: float, r: np.ndarray) -> np.ndarray:
    if family == "schrodinger":
        return np.exp(-1j * t * 4.0 * np.pi**2 * r**2)
    if family == "wave_sine":
        # sin(2 pi t r)/(2 pi r) = t sinc(2 t r); removable singularity at r = 0
        return (t * np.sinc(2.0 * t * r)).astype(np.complex128)
    if family == "wave_cosine":
        return np.cos(2.0 * np.pi * t * r).astype(np.complex128)
    mu = np.sqrt(1.0 + (2.0 * np.pi * r) ** 2)
    if family == "kg_sine":
        return (np.sin(t * mu) / mu).astype(np.complex128)
    return np.cos(t * mu).astype(np.complex128)


def symbol(kind: PropagatorKind, xi) -> np.ndarray | complex:
    """Evaluate the multiplier at frequency point(s) ``xi``.

    A scalar is a one-dimensional frequency; otherwise the trailing axis of
    ``xi`` holds the coordinates of each point.
    """
    arr = np.asarray(xi, dtype=float)
    r = np.abs(arr) if arr.ndim == 0 else np.sqrt(np.sum(arr**2, axis=-1))
    out = _symbol_from_radius(kind.family, kind.t, np.atleast_1d(r))
    return complex(out[0]) if np.ndim(r) == 0 else out


@lru_cache(maxsize=32)
def _radius(grid: GridSpec) -> np.ndarray:
    mesh = grid.dual_mesh()
    return np.sqrt(sum(m**2 for m in mesh))


def apply(kind: PropagatorKind, f: SampledField) -> SampledField:
    """Multiplier action: inverse transform of symbol times the transform."""
    if f.domain != "space":
        raise ValueError("propagators act on space-domain fields")
    sym = _symbol_from_radius(kind.family, kind.t, _radius(f.grid))
    out = _backward_values(sym * _forward_values(f.values, f.grid), f.grid)
    return SampledField(f.grid, out, "space")


@dataclass(frozen=True)
class BoundRatioReport:
    family: str
    dim: int
    params: ModParams
    rows: tuple  # (t, ratio, normalized_ratio)
    empirical_constant: float

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "ratio", "normalized_ratio"])
            for t, ratio, norm in self.rows:
                writer.writerow([repr(t), repr(ratio), repr(norm)])

    def to_svg(self, path):
        from .report import svg_line_plot

        ts = [r[0] for r in self.rows]
        svg_line_plot(
            path,
            ts,
            {"ratio": [r[1] for r in self.rows], "normalized": [r[2] for r in self.rows]},
            title=f"{self.family}: norm growth vs (1+t^2)^(n/4)",
            xlabel="t",
        )


def bound_ratio(family: str, t_grid, battery, params: ModParams) -> BoundRatioReport:
    """Battery-maximal norm growth of one family along a time grid.

    For each t the ratio is max over battery fields of the output norm over
    the input norm; ``normalized_ratio`` divides out (1+t^2)^(dim/4) and its
    maximum over the grid is the empirical multiplier constant.
    """
    fields = list(battery.values() if isinstance(battery, dict) else battery)
    if not fields:
        raise ValueError("battery must be nonempty")
    dim = fields[0].grid.dim
    base = [mod_norm(f, params) for f in fields]
    rows = []
    for t in t_grid:
        kind = PropagatorKind(family, float(t))
        ratio = max(
            mod_norm(apply(kind, f), params) / b for f, b in zip(fields, base) if b > 0
        )
        envelope = (1.0 + float(t) ** 2) ** (dim / 4.0)
        rows.append((float(t), float(ratio), float(ratio / envelope)))
    cn = max(r[2] for r in rows)
    return BoundRatioReport(family, dim, params, tuple(rows), float(cn))
