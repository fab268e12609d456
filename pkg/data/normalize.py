import numpy as np

from data.sequence import ImageSequence
from utils.errors import ConfigError


def normalize_sequence(seq: ImageSequence) -> ImageSequence:
    """Scale the whole sequence so its largest pixel magnitude is 1."""
    peak = seq.max_magnitude()
    if peak == 0.0:
        raise ConfigError("cannot normalize an all-zero sequence")
    # Already normalized up to rounding of the magnitude itself
    if abs(peak - 1.0) <= 8 * np.finfo(np.float64).eps:
        return seq
    return ImageSequence(seq.frames / np.float64(peak))
