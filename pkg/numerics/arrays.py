import logging
from typing import TypeAlias

import numpy as np
from numpy.typing import NDArray

from utils.errors import DimensionError, NumericError

logger = logging.getLogger(__name__)

ComplexArray2D: TypeAlias = NDArray[np.complex128]
RealArray2D: TypeAlias = NDArray[np.float64]


def as_complex_image(x, allow_batch: bool = False) -> ComplexArray2D:
    """Coerce to complex128 and check the ComplexArray2D invariants (2-D, finite)."""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 2 and not (allow_batch and arr.ndim > 2):
        message = f"expected a 2-D image, got shape {arr.shape}"
        logger.error(message)
        raise DimensionError(message)
    if arr.size == 0:
        raise DimensionError(f"image must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NumericError("image contains NaN or Inf")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray, what: str = "arrays") -> None:
    if a.shape != b.shape:
        message = f"{what} differ in shape: {a.shape} vs {b.shape}"
        logger.error(message)
        raise DimensionError(message)


def inner(a: ComplexArray2D, b: ComplexArray2D) -> complex:
    """Σ conj(a)·b over all entries."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    check_same_shape(a, b, "inner product operands")
    return complex(np.vdot(a, b))


def squared_norm(x: np.ndarray) -> float:
    """‖x‖₂² treating real and imaginary parts as separate coordinates."""
    flat = np.ravel(x)
    return float(np.vdot(flat, flat).real)


def complex_normal(rng: np.random.Generator, shape) -> ComplexArray2D:
    """Independent N(0, 1) real and imaginary channels (so E|z|² = 2)."""
    draws = rng.standard_normal((2,) + tuple(shape))
    return draws[0] + 1j * draws[1]


def ensure_finite(x: np.ndarray, where) -> np.ndarray:
    if not np.all(np.isfinite(x)):
        raise NumericError("non-finite state", where=where)
    return x


def to_channels(x: ComplexArray2D) -> NDArray[np.float64]:
    """Complex (…, n, n) → real (…, 2n²) with real channel first, then imaginary."""
    x = np.asarray(x)
    lead = x.shape[:-2]
    return np.concatenate(
        [x.real.reshape(lead + (-1,)), x.imag.reshape(lead + (-1,))], axis=-1
    )


def from_channels(v: NDArray[np.float64], rows: int, cols: int) -> ComplexArray2D:
    """Inverse of :func:`to_channels`."""
    v = np.asarray(v, dtype=np.float64)
    half = rows * cols
    lead = v.shape[:-1]
    return (v[..., :half] + 1j * v[..., half:]).reshape(lead + (rows, cols))
