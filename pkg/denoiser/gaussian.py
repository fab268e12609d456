"""Analytic ε-predictors for Gaussian image priors.

Both oracles treat real and imaginary channels as independent coordinates
with the same per-pixel variance, matching the complex standard normal
noise of the forward process.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from denoiser.base import Denoiser, DenoiserContext
from diffusion.schedule import NoiseSchedule
from numerics.arrays import ComplexArray2D, as_complex_image, check_same_shape, complex_normal
from utils.errors import ConfigError


@dataclass(frozen=True, eq=False)
class GaussianPriorSpec:
    """x0 ~ N(mean, diag(var)) on each channel."""

    mean: ComplexArray2D
    var: NDArray[np.float64]

    def __post_init__(self):
        mean = as_complex_image(self.mean)
        var = np.broadcast_to(np.asarray(self.var, dtype=np.float64), mean.shape).copy()
        if np.any(var < 0) or not np.all(np.isfinite(var)):
            raise ConfigError("prior variance must be finite and nonnegative")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "var", var)

    @property
    def shape(self):
        return self.mean.shape

    def sample(self, rng: np.random.Generator) -> ComplexArray2D:
        return self.mean + np.sqrt(self.var) * complex_normal(rng, self.shape)


def posterior_mean_x0(prior: GaussianPriorSpec, xt: ComplexArray2D, t: int, sched: NoiseSchedule) -> ComplexArray2D:
    """E[x0 | xt] = μ + √ᾱ_t Σ (ᾱ_t Σ + (1−ᾱ_t) I)⁻¹ (xt − √ᾱ_t μ)."""
    a = sched.alpha_bar_at(t)
    gain = math.sqrt(a) * prior.var / (a * prior.var + (1.0 - a))
    return prior.mean + gain * (xt - math.sqrt(a) * prior.mean)


def gaussian_eps(prior: GaussianPriorSpec, xt: ComplexArray2D, t: int, sched: NoiseSchedule) -> ComplexArray2D:
    """E[ε | xt] under the prior: (xt − √ᾱ_t·E[x0|xt]) / √(1−ᾱ_t)."""
    sched.check_step(t)
    xt = as_complex_image(xt)
    check_same_shape(xt, prior.mean, "prior and xt")
    a = sched.alpha_bar_at(t)
    # Same value as the formula above, written without the 0/0 cancellation as ᾱ_t → 1
    scale = math.sqrt(1.0 - a) / (a * prior.var + (1.0 - a))
    return scale * (xt - math.sqrt(a) * prior.mean)


class GaussianOracle(Denoiser):
    """Exact ε-prediction for frames drawn independently from one Gaussian prior."""

    def __init__(self, prior: GaussianPriorSpec, sched: NoiseSchedule):
        self.prior = prior
        self.sched = sched

    def predict_eps(self, xt: ComplexArray2D, t: int, ctx: DenoiserContext) -> ComplexArray2D:
        xt = self.check_inputs(xt, ctx)
        return gaussian_eps(self.prior, xt, t, self.sched)


class GaussianMarkovOracle(Denoiser):
    """Exact ε-prediction for a stationary first-order Gauss–Markov sequence.

    x_n | x_{n−1} ~ N(μ + ρ(x_{n−1} − μ), (1 − ρ²) Σ); ρ = 0 is :class:`GaussianOracle`.
    """

    def __init__(self, prior: GaussianPriorSpec, rho: float, sched: NoiseSchedule):
        if not -1.0 < rho < 1.0:
            raise ConfigError(f"correlation rho must lie in (-1, 1), got {rho}")
        self.prior = prior
        self.rho = rho
        self.sched = sched

    def conditional_prior(self, previous: ComplexArray2D) -> GaussianPriorSpec:
        mean = self.prior.mean + self.rho * (previous - self.prior.mean)
        return GaussianPriorSpec(mean, (1.0 - self.rho ** 2) * self.prior.var)

    def predict_eps(self, xt: ComplexArray2D, t: int, ctx: DenoiserContext) -> ComplexArray2D:
        xt = self.check_inputs(xt, ctx)
        return gaussian_eps(self.conditional_prior(ctx.latest), xt, t, self.sched)

    def sample_sequence(self, rng: np.random.Generator, length: int) -> NDArray[np.complex128]:
        """Frames x_0..x_{length−1} from the stationary chain."""
        if length < 1:
            raise ConfigError(f"sequence length must be >= 1, got {length}")
        frames = [self.prior.sample(rng)]
        for _ in range(length - 1):
            frames.append(self.conditional_prior(frames[-1]).sample(rng))
        return np.stack(frames)
