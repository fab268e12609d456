"""Unitary 2-D FFTs on power-of-two grids.

The frequency origin sits at index (0, 0). ``fftshift2``/``ifftshift2``
exist for display only; masks and k-space are always indexed unshifted.
"""

import logging

import numpy as np

from numerics.arrays import ComplexArray2D, as_complex_image
from utils.errors import DimensionError

logger = logging.getLogger(__name__)


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _check_dims(x: np.ndarray) -> None:
    rows, cols = x.shape[-2:]
    if not (is_power_of_two(rows) and is_power_of_two(cols)):
        message = f"FFT needs power-of-two dimensions, got {rows}x{cols}"
        logger.error(message)
        raise DimensionError(message)


def fft2(x: ComplexArray2D) -> ComplexArray2D:
    """Unitary forward DFT over the last two axes (``‖fft2(x)‖₂ = ‖x‖₂``)."""
    x = as_complex_image(x, allow_batch=True)
    _check_dims(x)
    return np.fft.fft2(x, norm="ortho")


def ifft2(k: ComplexArray2D) -> ComplexArray2D:
    """Unitary inverse DFT over the last two axes; exact adjoint of :func:`fft2`."""
    k = as_complex_image(k, allow_batch=True)
    _check_dims(k)
    return np.fft.ifft2(k, norm="ortho")


def fftshift2(k: np.ndarray) -> np.ndarray:
    return np.fft.fftshift(k, axes=(-2, -1))


def ifftshift2(k: np.ndarray) -> np.ndarray:
    return np.fft.ifftshift(k, axes=(-2, -1))


def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix; O(n²) memory, used as a brute-force reference."""
    idx = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)
