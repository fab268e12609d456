"""Posterior summaries: MMSE estimate, magnitude variance and confidence half-widths."""

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import stats

from sampler.reconstruction import PosteriorSamples
from utils.errors import ConfigError


@dataclass(frozen=True, eq=False)
class UncertaintyMap:
    mean: NDArray[np.complex128]
    mean_magnitude: NDArray[np.float64]
    variance: NDArray[np.float64]
    ci_halfwidth: NDArray[np.float64]
    confidence: float = 0.95

    @property
    def lower(self) -> NDArray[np.float64]:
        return self.mean_magnitude - self.ci_halfwidth

    @property
    def upper(self) -> NDArray[np.float64]:
        return self.mean_magnitude + self.ci_halfwidth


def t_score(confidence: float, dof: int) -> float:
    """Two-sided Student-t quantile, e.g. t(0.975, S−1) for 95%."""
    return float(stats.t.ppf(0.5 + confidence / 2.0, dof))


def summarize(samples: NDArray[np.complex128], confidence: float = 0.95) -> UncertaintyMap:
    """Summary of S samples stacked on axis 0."""
    samples = np.asarray(samples, dtype=np.complex128)
    S = samples.shape[0]
    if S < 2:
        raise ConfigError(f"confidence maps need at least 2 samples, got {S}")
    if not 0.0 < confidence < 1.0:
        raise ConfigError(f"confidence must lie in (0, 1), got {confidence}")
    magnitudes = np.abs(samples)
    variance = magnitudes.var(axis=0, ddof=1)
    halfwidth = t_score(confidence, S - 1) * np.sqrt(variance / S)
    return UncertaintyMap(
        mean=samples.mean(axis=0),
        mean_magnitude=magnitudes.mean(axis=0),
        variance=variance,
        ci_halfwidth=halfwidth,
        confidence=confidence,
    )


def mmse_and_ci(samples: PosteriorSamples, frame: int, confidence: float = 0.95) -> UncertaintyMap:
    """MMSE estimate (complex sample mean) and confidence map for one frame (0-based)."""
    if not 0 <= frame < samples.n_frames:
        raise ConfigError(f"frame index {frame} out of range for {samples.n_frames} frame(s)")
    return summarize(samples.frame(frame), confidence)


def highlight_mask(um: UncertaintyMap, fraction: float) -> NDArray[np.uint8]:
    """1 where the CI half-width exceeds ``fraction`` of the peak mean magnitude."""
    if fraction < 0 or not math.isfinite(fraction):
        raise ConfigError(f"highlight fraction must be a finite value >= 0, got {fraction}")
    threshold = fraction * float(np.max(np.abs(um.mean)))
    return (um.ci_halfwidth > threshold).astype(np.uint8)
