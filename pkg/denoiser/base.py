import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from numerics.arrays import ComplexArray2D, as_complex_image
from utils.errors import ConfigError, DimensionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DenoiserContext:
    """Clean frames x_0..x_{n−1} (oldest first) preceding target position n."""

    cond_frames: NDArray[np.complex128]
    position: int

    def __post_init__(self):
        frames = np.asarray(self.cond_frames, dtype=np.complex128)
        if frames.ndim == 2:
            frames = frames[None]
        if frames.ndim != 3 or frames.shape[0] < 1:
            raise DimensionError(f"conditioning frames must be (k, rows, cols) with k >= 1, got {frames.shape}")
        if self.position < 1:
            raise ConfigError(f"target position must be >= 1, got {self.position}")
        object.__setattr__(self, "cond_frames", frames)

    @property
    def frame_shape(self):
        return self.cond_frames.shape[1:]

    @property
    def latest(self) -> ComplexArray2D:
        return self.cond_frames[-1]


class Denoiser(ABC):
    """ε_θ(x_t, t, x_{<n}): predicts the noise in a noisy frame given its clean predecessors."""

    @abstractmethod
    def predict_eps(self, xt: ComplexArray2D, t: int, ctx: DenoiserContext) -> ComplexArray2D:
        ...

    def predict_parallel(
        self,
        cond_frames: NDArray[np.complex128],
        noisy: NDArray[np.complex128],
        ts: NDArray[np.int64],
    ) -> NDArray[np.complex128]:
        """Predictions for every target position at once.

        Row i holds position i+1: noisy frame ``noisy[i]`` at step ``ts[i]``
        conditioned on ``cond_frames[:i+1]``.
        """
        if not (len(cond_frames) == len(noisy) == len(ts)):
            raise DimensionError(
                f"parallel inputs disagree in length: {len(cond_frames)}, {len(noisy)}, {len(ts)}"
            )
        return np.stack([
            self.predict_eps(noisy[i], int(ts[i]), DenoiserContext(cond_frames[:i + 1], i + 1))
            for i in range(len(ts))
        ])

    @staticmethod
    def check_inputs(xt: ComplexArray2D, ctx: DenoiserContext) -> ComplexArray2D:
        xt = as_complex_image(xt)
        if xt.shape != tuple(ctx.frame_shape):
            message = f"noisy frame {xt.shape} does not match conditioning frames {tuple(ctx.frame_shape)}"
            logger.error(message)
            raise DimensionError(message)
        return xt
