"""Image quality metrics on magnitude images."""

import math

import numpy as np

from numerics.arrays import ComplexArray2D, check_same_shape
from utils.errors import ConfigError


def _magnitudes(ref: ComplexArray2D, est: ComplexArray2D):
    ref = np.abs(np.asarray(ref))
    est = np.abs(np.asarray(est))
    check_same_shape(ref, est, "reference and estimate")
    return ref, est


def psnr(ref: ComplexArray2D, est: ComplexArray2D) -> float:
    """Peak signal-to-noise ratio in dB: 10·log10(max|ref|² / MSE).

    Returns ``math.inf`` when the magnitudes agree exactly.
    """
    ref, est = _magnitudes(ref, est)
    peak = float(ref.max())
    if peak == 0.0:
        raise ConfigError("PSNR is undefined for an all-zero reference")
    mse = float(np.mean((ref - est) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak ** 2 / mse)


def nrmse(ref: ComplexArray2D, est: ComplexArray2D) -> float:
    """‖|est| − |ref|‖₂ / ‖|ref|‖₂."""
    ref, est = _magnitudes(ref, est)
    norm = float(np.linalg.norm(ref))
    if norm == 0.0:
        raise ConfigError("NRMSE is undefined for an all-zero reference")
    return float(np.linalg.norm(est - ref)) / norm
