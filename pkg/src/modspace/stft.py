"""Short-time Fourier transform on the full (x, w) product lattice.

Rows are computed through the convolution identity: the row at frequency w is
exp(-2 pi i x.w) (f * M_w g^*)(x) with g^*(y) = conj(g(-y)), each convolution
evaluated spectrally.  Row chunks are independent, which keeps peak memory at
a small multiple of the output and lets norm evaluation stream over rows
without materializing the matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import GridSpec, SampledField, _backward_values, _forward_values, sample_builtin

__all__ = ["TFMatrix", "stft", "canonical_window", "window_equivalence_ratio", "WindowEquivalence"]

# Refuse outputs beyond this size; at default resolutions this caps dim <= 2.
MEMORY_CAP_BYTES = 2 << 30


@dataclass(frozen=True, eq=False)
class TFMatrix:
    """Sampled V_g f; ``values[j, k]`` holds V_g f(x_k, w_j) on flattened lattices."""

    grid: GridSpec
    values: np.ndarray
    window_id: str = "custom"

    def w_points(self) -> np.ndarray:
        return self.grid.dual_points()

    def x_points(self) -> np.ndarray:
        return self.grid.points()


def tfmatrix_to_csv(tf: TFMatrix, path, stride: int = 1):
    """Magnitude rows (w, x, |V|); ``stride`` thins large lattices for plotting."""
    import csv

    w, x = tf.w_points(), tf.x_points()
    mag = np.abs(tf.values)
    dim = tf.grid.dim
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"w{d + 1}" for d in range(dim)] + [f"x{d + 1}" for d in range(dim)] + ["absV"])
        for j in range(0, tf.grid.size, stride):
            for k in range(0, tf.grid.size, stride):
                writer.writerow([*(repr(float(c)) for c in w[j]),
                                 *(repr(float(c)) for c in x[k]),
                                 repr(float(mag[j, k]))])


def tfmatrix_to_svg(tf: TFMatrix, path, title: str = ""):
    """Grayscale spectrogram (dimension-1 lattices render directly)."""
    from .report import svg_heatmap

    svg_heatmap(path, np.abs(tf.values), title=title or f"|V_g f| ({tf.window_id} window)",
                xlabel="x", ylabel="w")


@lru_cache(maxsize=32)
def _plan(grid: GridSpec):
    """Static per-grid data for row evaluation."""
    x = grid.points()
    w = grid.dual_points()
    n = grid.samples
    offsets = np.stack(
        np.meshgrid(*([np.arange(n) - n // 2] * grid.dim), indexing="ij"), axis=-1
    ).reshape(-1, grid.dim)
    return x, w, offsets


def _gather_shifted(conj_ghat: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """conj_ghat(xi - w_j) for a chunk of frequency offsets; circular in each axis."""
    n = conj_ghat.shape[0]
    dim = conj_ghat.ndim
    base = np.arange(n)
    if dim == 1:
        idx = (base[None, :] - offsets[:, 0:1]) % n
        return conj_ghat[idx]
    if dim == 2:
        i0 = (base[None, :] - offsets[:, 0:1]) % n
        i1 = (base[None, :] - offsets[:, 1:2]) % n
        return conj_ghat[i0[:, :, None], i1[:, None, :]]
    i0 = (base[None, :] - offsets[:, 0:1]) % n
    i1 = (base[None, :] - offsets[:, 1:2]) % n
    i2 = (base[None, :] - offsets[:, 2:3]) % n
    return conj_ghat[i0[:, :, None, None], i1[:, None, :, None], i2[:, None, None, :]]


def _check_window(g: SampledField):
    if not np.any(g.values):
        raise ValueError("window must be nonzero")


def _row_chunks(size: int, per_row_bytes: int):
    target = 64 << 20
    chunk = max(1, min(size, target // max(per_row_bytes, 1)))
    for start in range(0, size, chunk):
        yield start, min(start + chunk, size)


def abs_rows(f: SampledField, g: SampledField, batch: np.ndarray | None = None):
    """Yield (start, stop, |rows|) over frequency chunks without phases.

    ``batch`` optionally stacks several space fields (B, *shape) sharing the
    window; the yielded block then has shape (B, chunk, size).  The unimodular
    phase of the convolution identity is dropped since only magnitudes are
    consumed here.
    """
    grid = f.grid
    if g.grid != grid:
        raise ValueError("window grid mismatch")
    if f.domain != "space" or g.domain != "space":
        raise ValueError("stft requires space-domain fields")
    _check_window(g)
    _, _, offsets = _plan(grid)
    values = f.values[None] if batch is None else batch
    fhat = _forward_values(values, grid)
    conj_ghat = np.conj(_forward_values(g.values, grid))
    nb = fhat.shape[0]
    per_row = 16 * grid.size * nb
    for start, stop in _row_chunks(grid.size, per_row):
        shifted = _gather_shifted(conj_ghat, offsets[start:stop])
        spec = fhat[:, None, ...] * shifted[None, ...]
        rows = _backward_values(spec, grid)
        yield start, stop, np.abs(rows.reshape(nb, stop - start, grid.size))


def stft(f: SampledField, g: SampledField) -> TFMatrix:
    """V_g f on the full product lattice; O(size^2) memory, chunked rows."""
    grid = f.grid
    if g.grid != grid:
        raise ValueError("window grid mismatch")
    if f.domain != "space" or g.domain != "space":
        raise ValueError("stft requires space-domain fields")
    _check_window(g)
    out_bytes = 16 * grid.size * grid.size
    if out_bytes > MEMORY_CAP_BYTES:
        raise ValueError(
            f"time-frequency matrix would take {out_bytes / 2**30:.1f} GiB; "
            "reduce samples (the full-lattice layout restricts dim <= 2 at default N)"
        )
    x, w, offsets = _plan(grid)
    fhat = _forward_values(f.values, grid)
    conj_ghat = np.conj(_forward_values(g.values, grid))
    out = np.empty((grid.size, grid.size), dtype=np.complex128)
    for start, stop in _row_chunks(grid.size, 16 * grid.size):
        shifted = _gather_shifted(conj_ghat, offsets[start:stop])
        rows = _backward_values(fhat[None, ...] * shifted, grid)
        phase = np.exp(-2j * np.pi * (w[start:stop] @ x.T))
        out[start:stop] = rows.reshape(stop - start, grid.size) * phase
    window_id = g.source[0] if g.source else "custom"
    return TFMatrix(grid, out, window_id)


def canonical_window(grid: GridSpec) -> SampledField:
    """The self-dual Gaussian exp(-pi |x|^2), the reference window everywhere."""
    return sample_builtin("gaussian", grid)


@dataclass(frozen=True)
class WindowEquivalence:
    ratio: float
    bound: float
    constant: float


def window_equivalence_ratio(f, g1, g2, p, q, s) -> WindowEquivalence:
    """Compare the norms measured through two windows.

    ``ratio`` is the g1-norm over the g2-norm of ``f``; ``bound`` is the
    weighted L^{1,1} norm of the cross-correlation surface V_{g2} g1 that
    controls the window change, and ``constant`` their quotient.
    """
    from .norms import ModParams, mixed_norm

    params = ModParams(p, q, s)
    n1 = mixed_norm(stft(f, g1), params)
    n2 = mixed_norm(stft(f, g2), params)
    if n2 == 0:
        raise ValueError("zero denominator: f has vanishing norm")
    bound = mixed_norm(stft(g1, g2), ModParams(1, 1, s))
    ratio = n1 / n2
    return WindowEquivalence(ratio=ratio, bound=bound, constant=ratio / bound)
