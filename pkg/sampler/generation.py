"""Sampling single frames and whole sequences from a trained or analytic prior."""

import logging
from typing import List, Literal, Optional, get_args

import numpy as np
from numpy.typing import NDArray
from tqdm import tqdm

from denoiser.base import Denoiser, DenoiserContext
from diffusion.process import ddim_step, ddpm_step, q_sample
from diffusion.schedule import NoiseSchedule
from numerics.arrays import ComplexArray2D, complex_normal, ensure_finite
from utils import settings
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

ChainMode = Literal["ddpm", "ddim"]
GenerationMode = Literal["retrospective", "prospective-warm", "prospective-cold", "boosted"]

VALID_CHAIN_MODES = set(get_args(ChainMode))
VALID_GENERATION_MODES = set(get_args(GenerationMode))


def _validate_enum(value: str, valid_values: set, field_name: str) -> str:
    if value not in valid_values:
        error_msg = f"Invalid {field_name}: '{value}'. Valid values: {sorted(valid_values)}"
        logger.error(error_msg)
        raise ConfigError(error_msg)
    return value


def sample_frame(
    model: Denoiser,
    ctx: DenoiserContext,
    sched: NoiseSchedule,
    rng: np.random.Generator,
    mode: str = "ddpm",
    x_start: Optional[ComplexArray2D] = None,
    start_t: Optional[int] = None,
) -> ComplexArray2D:
    """Run the reverse chain from ``start_t`` (default T) down to 0.

    Without ``x_start`` the chain starts from a standard normal draw.
    """
    _validate_enum(mode, VALID_CHAIN_MODES, "chain mode")
    start_t = sched.T if start_t is None else start_t
    sched.check_step(start_t)
    shape = tuple(ctx.frame_shape)
    x = complex_normal(rng, shape) if x_start is None else np.asarray(x_start, dtype=np.complex128)
    for t in range(start_t, 0, -1):
        eps = model.predict_eps(x, t, ctx)
        if mode == "ddpm":
            x = ddpm_step(x, eps, t, sched, rng)
        else:
            x = ddim_step(x, eps, t, sched)
        ensure_finite(x, where=(ctx.position, t))
    return x


class SequenceGenerator:
    """Sliding-window autoregressive generation in the four supported modes."""

    def __init__(
        self,
        model: Denoiser,
        sched: NoiseSchedule,
        window: int = 4,
        chain: str = "ddpm",
        boost_steps: Optional[int] = None,
        show_progress: bool = settings.SHOW_PROGRESS,
    ):
        if window < 1:
            raise ConfigError(f"window must be >= 1, got {window}")
        self.model = model
        self.sched = sched
        self.window = window
        self.chain = _validate_enum(chain, VALID_CHAIN_MODES, "chain mode")
        self.boost_steps = max(1, sched.T // 4) if boost_steps is None else boost_steps
        if not 1 <= self.boost_steps <= sched.T:
            raise ConfigError(f"boost steps must lie in [1, {sched.T}], got {self.boost_steps}")
        self.show_progress = show_progress
        self.logger = logging.getLogger(self.__class__.__name__)

    def _sample(self, window_frames: List[ComplexArray2D], position: int, rng, boosted: bool):
        ctx = DenoiserContext(np.stack(window_frames), position)
        if not boosted:
            return sample_frame(self.model, ctx, self.sched, rng, self.chain)
        tau = self.boost_steps
        x_start = q_sample(window_frames[-1], tau, complex_normal(rng, ctx.frame_shape), self.sched)
        return sample_frame(self.model, ctx, self.sched, rng, self.chain, x_start=x_start, start_t=tau)

    def generate(
        self,
        init: Optional[NDArray[np.complex128]],
        n_frames: int,
        mode: str,
        rng: np.random.Generator,
        shape=None,
    ) -> NDArray[np.complex128]:
        """Generated frames as an (n_frames, rows, cols) array.

        retrospective: frame n conditions on the original frames ``init[:n]``.
        prospective-warm / boosted: the window starts as the last ``window``
        frames of ``init`` and slides over generated frames.
        prospective-cold: the window starts as ``window`` zero frames.
        """
        _validate_enum(mode, VALID_GENERATION_MODES, "generation mode")
        if n_frames < 0:
            raise ConfigError(f"n_frames must be >= 0, got {n_frames}")
        init = None if init is None else np.asarray(init, dtype=np.complex128)
        if init is not None and init.ndim == 2:
            init = init[None]
        if init is None or len(init) == 0:
            if mode != "prospective-cold":
                raise ConfigError(f"mode '{mode}' needs initial frames")
            if shape is None:
                raise ConfigError("cold start needs a frame shape")
        else:
            shape = init.shape[1:]

        if mode == "retrospective" and len(init) < n_frames:
            raise ConfigError(f"retrospective sampling of {n_frames} frames needs as many originals, got {len(init)}")
        if mode == "prospective-warm" and len(init) < self.window:
            raise ConfigError(f"prospective-warm needs a full window of {self.window} frames, got {len(init)}")

        if mode == "prospective-cold":
            window_frames = [np.zeros(shape, dtype=np.complex128) for _ in range(self.window)]
        elif mode != "retrospective":
            window_frames = list(init[-self.window:])

        out = np.empty((n_frames,) + tuple(shape), dtype=np.complex128)
        for n in tqdm(range(1, n_frames + 1), desc=mode, disable=not self.show_progress):
            if mode == "retrospective":
                frame = self._sample(list(init[max(0, n - self.window):n]), n, rng, boosted=False)
            else:
                frame = self._sample(window_frames, n, rng, boosted=(mode == "boosted"))
                window_frames.append(frame)
                if len(window_frames) > self.window:
                    window_frames.pop(0)
            out[n - 1] = frame
        self.logger.debug(f"generated {n_frames} frame(s) in {mode} mode")
        return out


def generate_sequence(
    model: Denoiser,
    init: Optional[NDArray[np.complex128]],
    n_frames: int,
    mode: str,
    sched: NoiseSchedule,
    rng: np.random.Generator,
    window: int = 4,
    chain: str = "ddpm",
    boost_steps: Optional[int] = None,
    shape=None,
) -> NDArray[np.complex128]:
    generator = SequenceGenerator(model, sched, window=window, chain=chain, boost_steps=boost_steps)
    return generator.generate(init, n_frames, mode, rng, shape=shape)
