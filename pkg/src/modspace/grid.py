"""Sampled complex fields on periodic boxes with integral-normalized transforms.

The box [-L/2, L/2)^n with N samples per axis stands in for R^n.  The forward
transform approximates f_hat(w) = int f(x) exp(-2 pi i w.x) dx (spacing factors
included), so continuum identities hold on the lattice with no hidden
constants.  Frequencies live on the centered dual lattice {-N/(2L), ...,
(N/2-1)/L}.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridSpec",
    "SampledField",
    "NumericalFailure",
    "sample_builtin",
    "transform",
    "inverse_transform",
    "reinterpret_to_space",
    "fourier_image",
    "translate",
    "modulate",
    "convolve",
    "pointwise",
    "add",
    "subtract",
    "multiply",
    "conjugate",
    "scale",
    "real_part",
    "imag_part",
    "l2_norm",
    "l1_norm",
    "save_field",
    "load_field",
    "field_to_csv",
    "smooth_bump",
]

BUILTIN_NAMES = ("gaussian", "triangle", "jump", "plane_wave", "random_bandlimited")


class NumericalFailure(RuntimeError):
    """A pipeline produced NaN/Inf values; maps to CLI exit code 2."""


@dataclass(frozen=True)
class GridSpec:
    """Periodic sampling lattice of the box [-L/2, L/2)^dim.

    Parameters
    ----------
    dim : int
        Spatial dimension, 1 <= dim <= 3.
    samples : int
        Points per axis, a power of two.
    extent : float
        Side length L of the box.
    """

    dim: int
    samples: int
    extent: float

    def __post_init__(self):
        if not 1 <= self.dim <= 3:
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        n = self.samples
        if n < 2 or (n & (n - 1)) != 0:
            raise ValueError(f"samples must be a power of two >= 2, got {n}")
        if not (self.extent > 0):
            raise ValueError(f"extent must be positive, got {self.extent}")
        object.__setattr__(self, "extent", float(self.extent))

    @property
    def spacing(self) -> float:
        return self.extent / self.samples

    @property
    def dual_spacing(self) -> float:
        return 1.0 / self.extent

    @property
    def dual_extent(self) -> float:
        return self.samples / self.extent

    @property
    def nyquist(self) -> float:
        """Largest resolved frequency magnitude per axis, N/(2L)."""
        return self.samples / (2.0 * self.extent)

    @property
    def shape(self) -> tuple:
        return (self.samples,) * self.dim

    @property
    def size(self) -> int:
        return self.samples**self.dim

    def axis(self) -> np.ndarray:
        """Spatial sample coordinates along one axis."""
        return -self.extent / 2.0 + self.spacing * np.arange(self.samples)

    def dual_axis(self) -> np.ndarray:
        """Centered frequency lattice along one axis."""
        return (np.arange(self.samples) - self.samples // 2) * self.dual_spacing

    def mesh(self) -> tuple:
        """dim arrays of shape ``self.shape`` with the spatial coordinates."""
        return np.meshgrid(*([self.axis()] * self.dim), indexing="ij")

    def dual_mesh(self) -> tuple:
        return np.meshgrid(*([self.dual_axis()] * self.dim), indexing="ij")

    def points(self) -> np.ndarray:
        """Flattened spatial lattice, shape (size, dim)."""
        return np.stack([m.ravel() for m in self.mesh()], axis=-1)

    def dual_points(self) -> np.ndarray:
        return np.stack([m.ravel() for m in self.dual_mesh()], axis=-1)

    def dual(self) -> "GridSpec":
        """The grid on which transforms of fields on this grid live."""
        return GridSpec(self.dim, self.samples, self.dual_extent)

    def refined(self) -> "GridSpec":
        """Same box with doubled sampling rate (N -> 2N)."""
        return GridSpec(self.dim, 2 * self.samples, self.extent)


@dataclass(frozen=True, eq=False)
class SampledField:
    """Complex samples of a function on a :class:`GridSpec`.

    ``domain`` is ``"space"`` or ``"frequency"``.  ``source`` records the
    catalog recipe for fields built by :func:`sample_builtin`, which makes
    them resampleable on refined grids (used by stability checks).
    """

    grid: GridSpec
    values: np.ndarray
    domain: str = "space"
    source: tuple | None = None

    def __post_init__(self):
        if self.domain not in ("space", "frequency"):
            raise ValueError(f"domain must be 'space' or 'frequency', got {self.domain!r}")
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape == (self.grid.size,):
            v = v.reshape(self.grid.shape)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid shape {self.grid.shape}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    # -- arithmetic conveniences (pure, validated) --------------------------

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return subtract(self, other)

    def __mul__(self, other):
        if isinstance(other, SampledField):
            return multiply(self, other)
        return scale(self, other)

    def __rmul__(self, other):
        return scale(self, other)

    def __neg__(self):
        return scale(self, -1.0)

    def conj(self) -> "SampledField":
        return conjugate(self)

    def resample(self, grid: GridSpec) -> "SampledField":
        """Re-evaluate a catalog field on another grid; requires ``source``."""
        if self.source is None:
            raise ValueError("field has no catalog source; cannot resample")
        name, items = self.source
        return sample_builtin(name, grid, dict(items))

    def check_finite(self, stage: str = "") -> "SampledField":
        if not np.all(np.isfinite(self.values)):
            raise NumericalFailure(f"non-finite values detected{' in ' + stage if stage else ''}")
        return self


def _require_same_grid(a: SampledField, b: SampledField):
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")


def _require_domain(f: SampledField, domain: str, what: str):
    if f.domain != domain:
        raise ValueError(f"{what} requires a {domain}-domain field, got {f.domain}")


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------


def _as_vector(value, dim, name) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.shape == (1,) and dim > 1:
        arr = np.repeat(arr, dim)
    if arr.shape != (dim,):
        raise ValueError(f"{name} must be a scalar or length-{dim} sequence")
    return arr


def sample_builtin(name: str, grid: GridSpec, params: dict | None = None) -> SampledField:
    """Sample one of the catalog functions on ``grid``.

    gaussian            width**-dim * exp(-pi |(x-center)/width|^2); unit mass,
                        so the width family is an approximate identity.
    triangle            (1 - |x - center|)_+, dimension 1 only.
    jump                the odd sawtooth 1-x on [0,1), -(1+x) on [-1,0), 0
                        outside (its modulus is the triangle); dimension 1 only.
    plane_wave          exp(2 pi i m.x) for integer mode m on the dual lattice.
    random_bandlimited  unit-L2 trigonometric polynomial with spectrum inside
                        |w| <= bandwidth, deterministic per seed and stable
                        under N -> 2N refinement at fixed L.
    """
    params = dict(params or {})
    if name not in BUILTIN_NAMES:
        raise ValueError(f"unknown catalog function {name!r}; choose from {BUILTIN_NAMES}")

    if name == "gaussian":
        center = _as_vector(params.pop("center", 0.0), grid.dim, "center")
        width = float(params.pop("width", 1.0))
        if width <= 0:
            raise ValueError("width must be positive")
        _reject_extra(name, params)
        mesh = grid.mesh()
        r2 = sum(((m - c) / width) ** 2 for m, c in zip(mesh, center))
        vals = width**-grid.dim * np.exp(-np.pi * r2)
        src = ("gaussian", (("center", tuple(center)), ("width", width)))
        return SampledField(grid, vals, "space", src)

    if name in ("triangle", "jump"):
        if grid.dim != 1:
            raise ValueError(f"{name} is defined in dimension 1 only")
        center = float(np.atleast_1d(params.pop("center", 0.0))[0])
        _reject_extra(name, params)
        x = grid.axis() - center
        if name == "triangle":
            vals = np.clip(1.0 - np.abs(x), 0.0, None)
        else:
            vals = np.where((x >= 0) & (x < 1), 1.0 - x, 0.0) + np.where(
                (x >= -1) & (x < 0), -1.0 - x, 0.0
            )
        return SampledField(grid, vals, "space", (name, (("center", center),)))

    if name == "plane_wave":
        mode = _as_vector(params.pop("mode", 1.0), grid.dim, "mode")
        _reject_extra(name, params)
        if not np.allclose(mode, np.round(mode), atol=1e-12):
            raise ValueError("plane_wave mode must be integer")
        lattice = mode * grid.extent
        if not np.allclose(lattice, np.round(lattice), atol=1e-9):
            raise ValueError("plane_wave mode is off the dual lattice for this extent")
        if np.any(np.abs(mode) >= grid.nyquist):
            raise ValueError("plane_wave mode at or beyond the Nyquist frequency")
        mesh = grid.mesh()
        phase = sum(m * c for m, c in zip(mesh, mode))
        vals = np.exp(2j * np.pi * phase)
        return SampledField(grid, vals, "space", ("plane_wave", (("mode", tuple(mode)),)))

    # random_bandlimited
    seed = int(params.pop("seed", 0))
    bandwidth = float(params.pop("bandwidth", min(2.0, grid.nyquist / 4.0)))
    _reject_extra(name, params)
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    if bandwidth >= grid.nyquist:
        raise ValueError(f"bandwidth {bandwidth} must lie below Nyquist {grid.nyquist}")
    w = grid.dual_points()
    inside = np.flatnonzero(np.einsum("ij,ij->i", w, w) <= bandwidth**2 + 1e-12)
    # Canonical draw order: sort modes by frequency tuple so that the same
    # (L, bandwidth, seed) yields the same function at every resolution.
    order = np.lexsort(tuple(w[inside, d] for d in reversed(range(grid.dim))))
    inside = inside[order]
    rng = np.random.default_rng(seed)
    coeff = rng.standard_normal(len(inside)) + 1j * rng.standard_normal(len(inside))
    spectrum = np.zeros(grid.size, dtype=np.complex128)
    spectrum[inside] = coeff / grid.dual_spacing**grid.dim
    freq = SampledField(grid, spectrum.reshape(grid.shape), "frequency")
    field = inverse_transform(freq)
    norm = l2_norm(field)
    vals = field.values / norm
    src = ("random_bandlimited", (("bandwidth", bandwidth), ("seed", seed)))
    return SampledField(grid, vals, "space", src)


def _reject_extra(name, params):
    if params:
        raise ValueError(f"unknown parameter(s) for {name}: {sorted(params)}")


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------


def _forward_values(values: np.ndarray, grid: GridSpec, axes=None) -> np.ndarray:
    """DFT calibrated to the continuum transform on the centered lattices."""
    axes = tuple(range(values.ndim - grid.dim, values.ndim)) if axes is None else axes
    shifted = np.fft.ifftshift(values, axes=axes)
    out = np.fft.fftn(shifted, axes=axes)
    return np.fft.fftshift(out, axes=axes) * grid.spacing**grid.dim


def _backward_values(values: np.ndarray, grid: GridSpec, axes=None) -> np.ndarray:
    axes = tuple(range(values.ndim - grid.dim, values.ndim)) if axes is None else axes
    shifted = np.fft.ifftshift(values, axes=axes)
    out = np.fft.ifftn(shifted, axes=axes)
    return np.fft.fftshift(out, axes=axes) / grid.spacing**grid.dim


def transform(field: SampledField) -> SampledField:
    """Forward transform; result is tagged frequency-domain on the same grid."""
    _require_domain(field, "space", "transform")
    return SampledField(field.grid, _forward_values(field.values, field.grid), "frequency")


def inverse_transform(field: SampledField) -> SampledField:
    _require_domain(field, "frequency", "inverse_transform")
    return SampledField(field.grid, _backward_values(field.values, field.grid), "space")


def reinterpret_to_space(field: SampledField) -> SampledField:
    """View a frequency-domain field as a space-domain field on the dual grid.

    The centered frequency lattice of ``field.grid`` coincides with the
    spatial lattice of ``field.grid.dual()``, so this is a pure re-tagging.
    """
    _require_domain(field, "frequency", "reinterpret_to_space")
    return SampledField(field.grid.dual(), field.values, "space")


def fourier_image(field: SampledField) -> SampledField:
    """The transform of ``field`` as a bona-fide space-domain field."""
    return reinterpret_to_space(transform(field))


# ---------------------------------------------------------------------------
# Elementary operators
# ---------------------------------------------------------------------------


def translate(field: SampledField, x0) -> SampledField:
    """f(. - x0) for a lattice-aligned shift x0 (exact index roll)."""
    x0 = _as_vector(x0, field.grid.dim, "x0")
    steps = x0 / field.grid.spacing
    if not np.allclose(steps, np.round(steps), atol=1e-9):
        raise ValueError(f"shift {x0} is off the lattice (spacing {field.grid.spacing})")
    shifts = tuple(int(round(s)) for s in steps)
    vals = np.roll(field.values, shifts, axis=tuple(range(field.grid.dim)))
    return SampledField(field.grid, vals, field.domain)


def modulate(field: SampledField, w0) -> SampledField:
    """exp(2 pi i w0 . x) f(x) for w0 on the dual lattice (exact phase)."""
    w0 = _as_vector(w0, field.grid.dim, "w0")
    steps = w0 * field.grid.extent
    if not np.allclose(steps, np.round(steps), atol=1e-9):
        raise ValueError(f"modulation {w0} is off the dual lattice (spacing {field.grid.dual_spacing})")
    mesh = field.grid.mesh()
    phase = sum(w * m for w, m in zip(w0, mesh))
    return SampledField(field.grid, field.values * np.exp(2j * np.pi * phase), field.domain)


def convolve(f: SampledField, k: SampledField) -> SampledField:
    """Periodic convolution scaled by spacing**dim, computed spectrally.

    Approximates int f(x-y) k(y) dy; the spectrum of the result is exactly
    the pointwise product of the two transforms.
    """
    _require_same_grid(f, k)
    _require_domain(f, "space", "convolve")
    _require_domain(k, "space", "convolve")
    g = f.grid
    prod = _forward_values(f.values, g) * _forward_values(k.values, g)
    return SampledField(g, _backward_values(prod, g), "space")


def add(a: SampledField, b: SampledField) -> SampledField:
    _require_same_grid(a, b)
    if a.domain != b.domain:
        raise ValueError("cannot add fields with different domain tags")
    return SampledField(a.grid, a.values + b.values, a.domain)


def subtract(a: SampledField, b: SampledField) -> SampledField:
    _require_same_grid(a, b)
    if a.domain != b.domain:
        raise ValueError("cannot subtract fields with different domain tags")
    return SampledField(a.grid, a.values - b.values, a.domain)


def multiply(a: SampledField, b: SampledField) -> SampledField:
    _require_same_grid(a, b)
    _require_domain(a, "space", "multiply")
    _require_domain(b, "space", "multiply")
    return SampledField(a.grid, a.values * b.values, "space")


def conjugate(a: SampledField) -> SampledField:
    return SampledField(a.grid, np.conj(a.values), a.domain)


def scale(a: SampledField, c) -> SampledField:
    return SampledField(a.grid, a.values * complex(c), a.domain)


def real_part(a: SampledField) -> SampledField:
    return SampledField(a.grid, a.values.real.astype(np.complex128), a.domain)


def imag_part(a: SampledField) -> SampledField:
    return SampledField(a.grid, a.values.imag.astype(np.complex128), a.domain)


_POINTWISE = {"add": add, "sub": subtract, "mul": multiply, "conj": conjugate, "scale": scale}


def pointwise(op: str, a: SampledField, b=None) -> SampledField:
    """Dispatch elementwise operations by name: add, sub, mul, conj, scale."""
    if op not in _POINTWISE:
        raise ValueError(f"unknown pointwise op {op!r}")
    if op == "conj":
        if b is not None:
            raise ValueError("conj takes a single field")
        return conjugate(a)
    if b is None:
        raise ValueError(f"{op} needs a second operand")
    return _POINTWISE[op](a, b)


def l2_norm(field: SampledField) -> float:
    """Discrete L2 norm with the volume element of the field's own lattice."""
    cell = field.grid.spacing if field.domain == "space" else field.grid.dual_spacing
    return float(np.sqrt(cell**field.grid.dim * np.sum(np.abs(field.values) ** 2)))


def l1_norm(field: SampledField) -> float:
    cell = field.grid.spacing if field.domain == "space" else field.grid.dual_spacing
    return float(cell**field.grid.dim * np.sum(np.abs(field.values)))


def smooth_bump(grid: GridSpec, center=0.0, r_inner: float = 1.0, r_outer: float = 2.0) -> SampledField:
    """C-infinity plateau bump: 1 on |x-center| <= r_inner, 0 beyond r_outer."""
    if not 0 < r_inner < r_outer:
        raise ValueError("need 0 < r_inner < r_outer")
    center = _as_vector(center, grid.dim, "center")
    mesh = grid.mesh()
    r = np.sqrt(sum((m - c) ** 2 for m, c in zip(mesh, center)))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        u = np.clip((r - r_inner) / (r_outer - r_inner), 0.0, 1.0)
        a = np.where(u < 1.0, np.exp(-1.0 / np.maximum(1.0 - u, 1e-300)), 0.0)
        b = np.where(u > 0.0, np.exp(-1.0 / np.maximum(u, 1e-300)), 0.0)
        vals = a / (a + b)
    return SampledField(grid, vals, "space")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def save_field(field: SampledField, path):
    """Binary container: one-line JSON header, then interleaved re/im float64 LE."""
    header = {
        "dim": field.grid.dim,
        "N": field.grid.samples,
        "L": field.grid.extent,
        "domain_tag": field.domain,
    }
    flat = field.values.ravel()
    inter = np.empty(2 * flat.size, dtype="<f8")
    inter[0::2] = flat.real
    inter[1::2] = flat.imag
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
        fh.write(inter.tobytes())


def load_field(path) -> SampledField:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        raw = np.frombuffer(fh.read(), dtype="<f8")
    grid = GridSpec(header["dim"], header["N"], header["L"])
    if raw.size != 2 * grid.size:
        raise ValueError(f"container payload has {raw.size} floats, expected {2 * grid.size}")
    vals = raw[0::2] + 1j * raw[1::2]
    return SampledField(grid, vals.reshape(grid.shape), header["domain_tag"])


def field_to_csv(field: SampledField, path):
    """CSV rows (index, coordinates, re, im) for plotting."""
    pts = field.grid.points() if field.domain == "space" else field.grid.dual_points()
    flat = field.values.ravel()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index"] + [f"x{d + 1}" for d in range(field.grid.dim)] + ["re", "im"])
        for i in range(flat.size):
            writer.writerow([i, *(repr(c) for c in pts[i]), repr(flat[i].real), repr(flat[i].imag)])


def parseval_defect(field: SampledField) -> float:
    """Relative mismatch of the discrete Plancherel identity for ``field``."""
    _require_domain(field, "space", "parseval_defect")
    a = l2_norm(field)
    b = l2_norm(transform(field))
    return abs(a - b) / max(a, 1e-300)


def _is_integer(x: float, tol: float = 1e-9) -> bool:
    return abs(x - round(x)) <= tol


def require_integer_extent(grid: GridSpec, what: str) -> int:
    if not _is_integer(grid.extent):
        raise ValueError(f"{what} requires an integer box extent, got {grid.extent}")
    return int(round(grid.extent))
