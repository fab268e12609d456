"""Synthetic receive-coil sensitivity maps."""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from numerics.rng import RngStream
from utils.errors import ConfigError, DimensionError

logger = logging.getLogger(__name__)

# Bump centres sit just outside the unit square of the field of view
BORDER_RADIUS = 1.2
MAX_PHASE_SLOPE = np.pi / 4


@dataclass(frozen=True, eq=False)
class CoilSensitivities:
    maps: NDArray[np.complex128]

    def __post_init__(self):
        maps = np.asarray(self.maps, dtype=np.complex128)
        if maps.ndim != 3 or maps.shape[0] < 1:
            raise DimensionError(f"coil maps must be (n_coils, rows, cols), got {maps.shape}")
        maps = maps.copy()
        maps.setflags(write=False)
        object.__setattr__(self, "maps", maps)

    @property
    def n_coils(self) -> int:
        return int(self.maps.shape[0])

    @property
    def shape(self):
        return self.maps.shape[1:]

    def sum_of_squares(self) -> NDArray[np.float64]:
        return np.sum(np.abs(self.maps) ** 2, axis=0)

    @classmethod
    def unit(cls, rows: int, cols: int) -> "CoilSensitivities":
        """Single coil with S = 1 everywhere."""
        return cls(np.ones((1, rows, cols), dtype=np.complex128))


def grid(n: int):
    """Pixel-centre coordinates on [-1, 1] along each axis (row, col)."""
    axis = (np.arange(n) + 0.5) * (2.0 / n) - 1.0
    return np.meshgrid(axis, axis, indexing="ij")


def max_gradient(coils: CoilSensitivities) -> float:
    """Largest |∇S_c| over coils and pixels, in field-of-view units (width 2)."""
    n = coils.shape[0]
    spacing = 2.0 / n
    worst = 0.0
    for s in coils.maps:
        d_row, d_col = np.gradient(s, spacing)
        worst = max(worst, float(np.max(np.sqrt(np.abs(d_row) ** 2 + np.abs(d_col) ** 2))))
    return worst


def normalize_maps(raw: np.ndarray) -> NDArray[np.complex128]:
    rss = np.sqrt(np.sum(np.abs(raw) ** 2, axis=0))
    return raw / np.maximum(rss, np.finfo(np.float64).tiny)


def synth_coils(
    n: int,
    n_coils: int,
    stream: RngStream,
    width: float = 0.6,
    smoothness_bound: float = 10.0,
) -> CoilSensitivities:
    """Gaussian-bump coil profiles around the border, normalized to Σ_c|S_c|² = 1."""
    if n_coils < 1:
        raise ConfigError(f"need at least one coil, got {n_coils}")
    if width <= 0:
        raise ConfigError(f"coil width must be positive, got {width}")

    rng = stream.generator()
    rows, cols = grid(n)
    offset = rng.uniform(0.0, 2.0 * np.pi)
    raw = np.empty((n_coils, n, n), dtype=np.complex128)
    for c in range(n_coils):
        angle = offset + 2.0 * np.pi * c / n_coils
        center_r = BORDER_RADIUS * np.sin(angle)
        center_c = BORDER_RADIUS * np.cos(angle)
        magnitude = np.exp(-((rows - center_r) ** 2 + (cols - center_c) ** 2) / (2.0 * width ** 2))
        slope_r, slope_c = rng.uniform(-MAX_PHASE_SLOPE, MAX_PHASE_SLOPE, size=2)
        phase = slope_r * rows + slope_c * cols + rng.uniform(-np.pi, np.pi)
        raw[c] = magnitude * np.exp(1j * phase)

    coils = CoilSensitivities(normalize_maps(raw))
    steepest = max_gradient(coils)
    if steepest > smoothness_bound:
        message = f"coil maps too steep: gradient {steepest:.3f} exceeds bound {smoothness_bound}"
        logger.error(message)
        raise ConfigError(message)
    logger.debug(f"synthesized {n_coils} coil map(s) at n={n}, max gradient {steepest:.3f}")
    return coils
