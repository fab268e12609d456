"""Posterior sampling of a frame sequence from undersampled k-space.

Each frame runs the reverse DDIM chain of the prior. After every reverse
step the state takes K gradient-ascent steps on log p(y_n | x) and,
optionally, receives fresh Gaussian noise. The finished frame joins the
conditioning of the next one. S chains run independently, each with its
own child random stream and its own conditioning history.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from numpy.typing import NDArray
from tqdm import tqdm

from denoiser.base import Denoiser, DenoiserContext
from diffusion.process import ddim_step
from diffusion.schedule import NoiseSchedule
from models.recon_models import ReconConfig
from mri.operator import KSpaceFrame, likelihood_grad
from numerics.arrays import ComplexArray2D, as_complex_image, complex_normal, ensure_finite
from numerics.rng import RngStream
from utils import settings
from utils.errors import ConfigError, DimensionError
from utils.logging import log_frame_done

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PosteriorSamples:
    """samples[n, s] is chain s's reconstruction of frame n + 1."""

    samples: NDArray[np.complex128]

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 4:
            raise DimensionError(f"posterior samples must be (frames, S, rows, cols), got {samples.shape}")
        object.__setattr__(self, "samples", samples)

    @property
    def n_frames(self) -> int:
        return int(self.samples.shape[0])

    @property
    def S(self) -> int:
        return int(self.samples.shape[1])

    def frame(self, n: int) -> NDArray[np.complex128]:
        return self.samples[n]


def noise_scale(sched: NoiseSchedule, t_prev: int, mode: str) -> float:
    """Std of the noise added after the data step that produced x^{t_prev}."""
    if mode == "cumulative":
        return math.sqrt(1.0 - sched.alpha_bar_at(t_prev))
    if mode == "per_step":
        return math.sqrt(1.0 - sched.alpha_at(t_prev))
    raise ConfigError(f"Invalid noise scale: '{mode}'. Valid values: ['cumulative', 'per_step']")


def reconstruct_frame(
    model: Denoiser,
    y: KSpaceFrame,
    ctx: DenoiserContext,
    cfg: ReconConfig,
    sched: NoiseSchedule,
    rng: np.random.Generator,
) -> ComplexArray2D:
    shape = tuple(ctx.frame_shape)
    if tuple(y.model.image_shape) != shape:
        raise DimensionError(f"k-space frame images {y.model.image_shape} do not match conditioning {shape}")
    x = complex_normal(rng, shape)
    for t in range(sched.T, 0, -1):
        where = (ctx.position, t)
        x = ensure_finite(ddim_step(x, model.predict_eps(x, t, ctx), t, sched), where=where)
        for _ in range(cfg.K):
            x = ensure_finite(x + cfg.lam * likelihood_grad(y.model, y, x), where=where)
        if cfg.noise_inject and t > 1:
            x = ensure_finite(x + noise_scale(sched, t - 1, cfg.noise_scale) * complex_normal(rng, shape), where=where)
    return x


def conditioning_frames(history: List[ComplexArray2D], cfg: ReconConfig) -> NDArray[np.complex128]:
    """Last ``window`` frames of x_0, x_1, …; optionally front-padded with x_0."""
    frames = history[-cfg.window:]
    if cfg.pad_with_x0 and len(frames) < cfg.window:
        frames = [history[0]] * (cfg.window - len(frames)) + frames
    return np.stack(frames)


class PosteriorReconstructor:
    def __init__(
        self,
        model: Denoiser,
        cfg: ReconConfig,
        sched: NoiseSchedule,
        threads: int = settings.DEFAULT_THREADS,
        show_progress: bool = settings.SHOW_PROGRESS,
    ):
        if sched.T != cfg.T:
            raise ConfigError(f"schedule has {sched.T} steps but the reconstruction asks for {cfg.T}")
        self.model = model
        self.cfg = cfg
        self.sched = sched
        self.threads = max(1, threads)
        self.show_progress = show_progress
        self.logger = logging.getLogger(self.__class__.__name__)

    def run(self, kspace_seq: Sequence[KSpaceFrame], x0: ComplexArray2D, stream: RngStream) -> PosteriorSamples:
        x0 = as_complex_image(x0)
        for n, y in enumerate(kspace_seq, start=1):
            if tuple(y.model.image_shape) != x0.shape:
                raise DimensionError(f"k-space frame {n} images {y.model.image_shape} do not match x0 {x0.shape}")
        S = self.cfg.S
        rngs = [stream.spawn(s).generator() for s in range(S)]
        histories = [[x0] for _ in range(S)]
        out = np.empty((len(kspace_seq), S) + x0.shape, dtype=np.complex128)

        self.logger.info(
            f"reconstructing {len(kspace_seq)} frame(s) with S={S}, T={self.cfg.T}, "
            f"lambda={self.cfg.lam}, K={self.cfg.K}, threads={self.threads}"
        )
        pool = ThreadPoolExecutor(max_workers=self.threads) if self.threads > 1 else None
        try:
            for n, y in enumerate(kspace_seq, start=1):
                started = time.perf_counter()

                def chain(s, y=y, n=n):
                    ctx = DenoiserContext(conditioning_frames(histories[s], self.cfg), n)
                    return reconstruct_frame(self.model, y, ctx, self.cfg, self.sched, rngs[s])

                chains = tqdm(range(S), desc=f"frame {n}", disable=not self.show_progress)
                frames = list(pool.map(chain, chains)) if pool else [chain(s) for s in chains]
                for s, frame in enumerate(frames):
                    histories[s].append(frame)
                    out[n - 1, s] = frame
                log_frame_done(n, S, time.perf_counter() - started)
        finally:
            if pool is not None:
                pool.shutdown()
        return PosteriorSamples(out)


def reconstruct(
    model: Denoiser,
    kspace_seq: Sequence[KSpaceFrame],
    x0: ComplexArray2D,
    cfg: ReconConfig,
    sched: NoiseSchedule,
    stream: RngStream,
    threads: int = 1,
) -> PosteriorSamples:
    return PosteriorReconstructor(model, cfg, sched, threads=threads, show_progress=False).run(kspace_seq, x0, stream)
