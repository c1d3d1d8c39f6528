"""Numerical time-frequency analysis on periodic grids.

Sampled fields with calibrated spectral transforms, short-time Fourier
transforms and weighted mixed norms, real-entire composition operators with
majorant certificates, dispersive Fourier-multiplier propagators, a Picard
fixed-point local solver for NLS/NLW/NLKG in integral form, and a
verification harness that measures every inequality the library implements.
"""

from .grid import (
    GridSpec,
    NumericalFailure,
    SampledField,
    convolve,
    fourier_image,
    inverse_transform,
    l1_norm,
    l2_norm,
    load_field,
    modulate,
    pointwise,
    sample_builtin,
    save_field,
    smooth_bump,
    transform,
    translate,
)
from .norms import ModParams, l2s_membership, mixed_norm, mod_norm, periodization_spectrum, torus_algebra_norm
from .series import RealEntireSeries, preset_series
from .stft import TFMatrix, canonical_window, stft, window_equivalence_ratio

__version__ = "0.1.0"
