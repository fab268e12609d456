"""The AID objective: one ε-prediction term per target position of a sequence."""

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Tuple

import numpy as np
from numpy.typing import NDArray

from data.sequence import ImageSequence
from diffusion.process import q_sample
from diffusion.schedule import NoiseSchedule
from numerics.arrays import complex_normal, squared_norm
from utils.errors import ConfigError, NumericError

if TYPE_CHECKING:
    from denoiser.base import Denoiser


@dataclass(frozen=True, eq=False)
class NoiseDraws:
    """The (t, ε) pair drawn for each target position 1..N."""

    ts: NDArray[np.int64]
    eps: NDArray[np.complex128]

    def __len__(self) -> int:
        return int(self.ts.shape[0])


@dataclass(frozen=True, eq=False)
class LossResult:
    total: float
    terms: NDArray[np.float64]
    draws: NoiseDraws


def draw_noise(seq: ImageSequence, sched: NoiseSchedule, rng: np.random.Generator) -> NoiseDraws:
    """Per target position draw t ~ U{1..T}, then ε ~ N(0, I); positions in order."""
    n_targets = len(seq) - 1
    ts = np.empty(n_targets, dtype=np.int64)
    eps = np.empty((n_targets,) + tuple(seq.shape), dtype=np.complex128)
    for i in range(n_targets):
        ts[i] = rng.integers(1, sched.T + 1)
        eps[i] = complex_normal(rng, seq.shape)
    return NoiseDraws(ts=ts, eps=eps)


def noisy_targets(seq: ImageSequence, draws: NoiseDraws, sched: NoiseSchedule) -> NDArray[np.complex128]:
    return np.stack([
        q_sample(seq[i + 1], int(draws.ts[i]), draws.eps[i], sched) for i in range(len(draws))
    ])


def position_terms(pred: NDArray[np.complex128], eps: NDArray[np.complex128]) -> NDArray[np.float64]:
    """‖ε̂_n − ε_n‖₂² per position, each reduced on its own frame."""
    terms = np.array([squared_norm(pred[i] - eps[i]) for i in range(pred.shape[0])], dtype=np.float64)
    for i, term in enumerate(terms):
        if not math.isfinite(term):
            raise NumericError("non-finite loss term", where=f"loss.position.{i + 1}")
    return terms


def aid_loss_with_draws(
    model: "Denoiser", seq: ImageSequence, draws: NoiseDraws, sched: NoiseSchedule
) -> LossResult:
    if len(seq) < 2:
        raise ConfigError(f"AID loss needs a conditioning frame and a target, got {len(seq)} frame(s)")
    noisy = noisy_targets(seq, draws, sched)
    # One call predicts every position; position n sees frames x_0..x_{n-1}
    pred = model.predict_parallel(seq.frames[:-1], noisy, draws.ts)
    terms = position_terms(pred, draws.eps)
    return LossResult(total=math.fsum(terms), terms=terms, draws=draws)


def aid_loss(
    model: "Denoiser", seq: ImageSequence, sched: NoiseSchedule, rng: np.random.Generator
) -> LossResult:
    """Stochastic estimate of the AID objective for one sequence (first frame conditions only)."""
    if len(seq) < 2:
        raise ConfigError(f"AID loss needs a conditioning frame and a target, got {len(seq)} frame(s)")
    return aid_loss_with_draws(model, seq, draw_noise(seq, sched, rng), sched)


def sequential_terms(
    model: "Denoiser", seq: ImageSequence, draws: NoiseDraws, sched: NoiseSchedule
) -> List[float]:
    """Reference evaluation: one model call per position with the same draws."""
    from denoiser.base import DenoiserContext

    noisy = noisy_targets(seq, draws, sched)
    terms = []
    for i in range(len(draws)):
        ctx = DenoiserContext(cond_frames=seq.frames[:i + 1], position=i + 1)
        pred = model.predict_eps(noisy[i], int(draws.ts[i]), ctx)
        terms.append(squared_norm(pred - draws.eps[i]))
    return terms


def batch_loss(
    model: "Denoiser", batch: List[ImageSequence], sched: NoiseSchedule, rng: np.random.Generator
) -> Tuple[float, List[LossResult]]:
    results = [aid_loss(model, seq, sched, rng) for seq in batch]
    return math.fsum(r.total for r in results), results
