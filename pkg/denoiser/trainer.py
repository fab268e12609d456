import logging
import math
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from data.sequence import ImageSequence
from denoiser.optim import AdamState, global_grad_norm, train_step
from denoiser.tsc_net import ParamGradients, TSCNetParams, forward_rows, leaf_tensors
from diffusion.loss import NoiseDraws, draw_noise, noisy_targets, position_terms
from diffusion.schedule import NoiseSchedule
from models.net_models import AdamConfig
from numerics.arrays import from_channels, to_channels
from numerics.rng import RngStream
from utils import settings
from utils.errors import ConfigError, NumericError
from utils.logging import log_train_progress


def sequence_grad(
    params: TSCNetParams, seq: ImageSequence, draws: NoiseDraws, sched: NoiseSchedule
) -> Tuple[float, ParamGradients]:
    """Loss and exact gradient for one sequence under fixed draws."""
    if len(seq) < 2:
        raise ConfigError(f"AID loss needs a conditioning frame and a target, got {len(seq)} frame(s)")
    config = params.config
    leaves = leaf_tensors(params)
    out = forward_rows(leaves, config, seq.frames[:-1], noisy_targets(seq, draws, sched), draws.ts)
    n = config.image_size
    terms = position_terms(from_channels(out.value, n, n), draws.eps)
    # d/d(out) of Σ‖out − ε‖²
    out.backward(2.0 * (out.value - to_channels(draws.eps)))
    grads = OrderedDict()
    for name, leaf in leaves.items():
        grad = leaf.grad if leaf.grad is not None else np.zeros_like(leaf.value)
        if not np.all(np.isfinite(grad)):
            raise NumericError("non-finite gradient", where=name)
        grads[name] = grad
    return math.fsum(terms), TSCNetParams(config, grads)


def grad_params(
    params: TSCNetParams,
    batch: Sequence[ImageSequence],
    sched: NoiseSchedule,
    rng: np.random.Generator,
    threads: int = 1,
) -> Tuple[float, ParamGradients]:
    """Summed loss and gradients over a batch.

    Draws are taken from ``rng`` sequence by sequence before any work is
    spread over threads, and the per-sequence gradients are summed in batch
    order, so the result does not depend on ``threads``.
    """
    if not batch:
        raise ConfigError("batch must hold at least one sequence")
    if params.config.T < sched.T:
        raise ConfigError(f"time table holds {params.config.T} steps, schedule needs {sched.T}")
    draws = [draw_noise(seq, sched, rng) for seq in batch]
    jobs = list(zip(batch, draws))

    def run(job):
        return sequence_grad(params, job[0], job[1], sched)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]

    total = params.zeros_like()
    for _, grads in results:
        total = total.add_scaled(grads)
    return math.fsum(loss for loss, _ in results), total


def moving_average(values: Sequence[float], window: int) -> List[float]:
    """Trailing mean over the last ``window`` values (shorter at the start)."""
    if window < 1:
        raise ConfigError(f"smoothing window must be >= 1, got {window}")
    out = []
    for i in range(len(values)):
        chunk = values[max(0, i + 1 - window):i + 1]
        out.append(math.fsum(chunk) / len(chunk))
    return out


@dataclass
class TrainResult:
    params: TSCNetParams
    losses: List[float] = field(default_factory=list)
    smoothed: List[float] = field(default_factory=list)
    grad_norms: List[float] = field(default_factory=list)


class Trainer:
    """Adam on the AID objective over batches of training windows."""

    def __init__(
        self,
        params: TSCNetParams,
        sched: NoiseSchedule,
        adam: AdamConfig = AdamConfig(),
        threads: int = settings.DEFAULT_THREADS,
        smoothing: int = 10,
        log_every: int = 10,
        show_progress: bool = settings.SHOW_PROGRESS,
    ):
        self.params = params
        self.sched = sched
        self.adam = adam
        self.state = AdamState.init(params)
        self.threads = threads
        self.smoothing = smoothing
        self.log_every = log_every
        self.show_progress = show_progress
        self.logger = logging.getLogger(self.__class__.__name__)

    def pick_batch(self, windows: Sequence[ImageSequence], batch_size: int, rng: np.random.Generator):
        index = rng.integers(0, len(windows), size=batch_size)
        return [windows[i] for i in index]

    def fit(
        self,
        windows: Sequence[ImageSequence],
        steps: int,
        batch_size: int,
        stream: RngStream,
        lr: Optional[float] = None,
    ) -> TrainResult:
        if not windows:
            raise ConfigError("no training windows")
        if steps < 0 or batch_size < 1:
            raise ConfigError(f"need steps >= 0 and batch_size >= 1, got {steps}, {batch_size}")
        self.logger.info(
            f"training {self.params.n_params()} parameters on {len(windows)} windows, "
            f"{steps} steps of batch {batch_size}"
        )
        result = TrainResult(self.params)
        for step in tqdm(range(steps), desc="train", disable=not self.show_progress):
            rng = stream.spawn(step).generator()
            batch = self.pick_batch(windows, batch_size, rng)
            loss, grads = grad_params(self.params, batch, self.sched, rng, threads=self.threads)
            self.params, self.state = train_step(self.params, grads, self.state, lr=lr, config=self.adam)
            result.losses.append(loss / batch_size)
            result.grad_norms.append(global_grad_norm(grads))
            if (step + 1) % self.log_every == 0 or step + 1 == steps:
                smoothed = moving_average(result.losses[-self.smoothing:], self.smoothing)[-1]
                log_train_progress(step + 1, result.losses[-1], smoothed, result.grad_norms[-1])
        result.params = self.params
        result.smoothed = moving_average(result.losses, self.smoothing)
        return result
