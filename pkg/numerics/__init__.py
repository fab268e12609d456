from numerics.arrays import (
    ComplexArray2D,
    RealArray2D,
    as_complex_image,
    check_same_shape,
    complex_normal,
    ensure_finite,
    from_channels,
    inner,
    squared_norm,
    to_channels,
)
from numerics.fft import dft_matrix, fft2, fftshift2, ifft2, ifftshift2, is_power_of_two
from numerics.rng import RngStream

__all__ = [
    "ComplexArray2D",
    "RealArray2D",
    "RngStream",
    "as_complex_image",
    "check_same_shape",
    "complex_normal",
    "dft_matrix",
    "ensure_finite",
    "fft2",
    "fftshift2",
    "from_channels",
    "ifft2",
    "ifftshift2",
    "inner",
    "is_power_of_two",
    "squared_norm",
    "to_channels",
]
