"""Computer-generated holography: unitary transforms, hologram generation
algorithms (iterative transform, holographic search, time-averaged), and
image quality metrics.

Fields are numpy arrays with shape (height, width): complex128 for
aperture/replay fields, float64 for target amplitudes and masks.
"""

from ._core import (
    __version__,
    adaptive_ospr,
    direct_search,
    fft_forward,
    fft_inverse,
    gs,
    lt,
    mse,
    ospr,
    quantise,
    simulated_annealing,
    ssim,
    wgs,
)

__all__ = [
    "__version__",
    "adaptive_ospr",
    "direct_search",
    "fft_forward",
    "fft_inverse",
    "gs",
    "lt",
    "mse",
    "ospr",
    "quantise",
    "simulated_annealing",
    "ssim",
    "wgs",
]
