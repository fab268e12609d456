import logging
from dataclasses import dataclass
from typing import Iterable, List

import numpy as np
from numpy.typing import NDArray

from numerics.arrays import ComplexArray2D
from utils.errors import ConfigError, DimensionError, NumericError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ImageSequence:
    """Ordered frames x_1..x_N of identical shape, stored as one (N, rows, cols) array."""

    frames: NDArray[np.complex128]

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.complex128)
        if frames.ndim != 3:
            raise DimensionError(f"sequence must be (N, rows, cols), got shape {frames.shape}")
        if frames.shape[0] < 1:
            raise ConfigError("sequence must hold at least one frame")
        if not np.all(np.isfinite(frames)):
            raise NumericError("sequence contains NaN or Inf")
        frames = frames.copy()
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @classmethod
    def from_frames(cls, frames: Iterable[ComplexArray2D]) -> "ImageSequence":
        frames = [np.asarray(f, dtype=np.complex128) for f in frames]
        if not frames:
            raise ConfigError("sequence must hold at least one frame")
        shapes = {f.shape for f in frames}
        if len(shapes) != 1:
            raise DimensionError(f"frames differ in shape: {sorted(shapes)}")
        return cls(np.stack(frames))

    def __len__(self) -> int:
        return int(self.frames.shape[0])

    def __getitem__(self, index: int) -> ComplexArray2D:
        return self.frames[index]

    def __iter__(self):
        return iter(self.frames)

    @property
    def shape(self):
        return self.frames.shape[1:]

    def max_magnitude(self) -> float:
        return float(np.max(np.abs(self.frames)))


def sequence_windows(seq: ImageSequence, window: int) -> List[ImageSequence]:
    """Contiguous sub-sequences of ``window + 1`` frames: conditioning x_0 plus ``window`` targets.

    Shorter volumes give a single window holding the whole sequence.
    """
    if window < 1:
        message = f"window must be >= 1, got {window}"
        logger.error(message)
        raise ConfigError(message)
    if len(seq) < 2:
        raise ConfigError("need at least two frames to cut training windows")
    length = min(window + 1, len(seq))
    return [ImageSequence(seq.frames[i:i + length]) for i in range(len(seq) - length + 1)]
