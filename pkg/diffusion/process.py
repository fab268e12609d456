"""Forward marginal, forward posterior and the two reverse updates.

All functions act on complex arrays with real coefficients, so the real
and imaginary channels are processed independently.
"""

import math
from typing import Optional, Tuple

import numpy as np

from diffusion.schedule import NoiseSchedule
from numerics.arrays import ComplexArray2D, check_same_shape, complex_normal


def q_sample(x0: ComplexArray2D, t: int, eps: ComplexArray2D, sched: NoiseSchedule) -> ComplexArray2D:
    """x_t = √ᾱ_t·x0 + √(1−ᾱ_t)·ε."""
    sched.check_step(t)
    check_same_shape(np.asarray(x0), np.asarray(eps), "x0 and eps")
    a = sched.alpha_bar_at(t)
    return math.sqrt(a) * x0 + math.sqrt(1.0 - a) * eps


def q_posterior_params(
    x0: ComplexArray2D, xt: ComplexArray2D, t: int, sched: NoiseSchedule
) -> Tuple[ComplexArray2D, float]:
    """Mean μ̃_t and variance β̃_t of q(x_{t−1} | x_t, x_0)."""
    sched.check_step(t)
    check_same_shape(np.asarray(x0), np.asarray(xt), "x0 and xt")
    a_bar = sched.alpha_bar_at(t)
    a_bar_prev = sched.alpha_bar_at(t - 1)
    beta = sched.beta_at(t)
    coef_x0 = math.sqrt(a_bar_prev) * beta / (1.0 - a_bar)
    coef_xt = math.sqrt(sched.alpha_at(t)) * (1.0 - a_bar_prev) / (1.0 - a_bar)
    return coef_x0 * x0 + coef_xt * xt, sched.beta_tilde_at(t)


def ddpm_step(
    xt: ComplexArray2D,
    eps_pred: ComplexArray2D,
    t: int,
    sched: NoiseSchedule,
    rng: Optional[np.random.Generator] = None,
) -> ComplexArray2D:
    """One ancestral step with fixed variance β_t. No noise at t = 1 or when ``rng`` is None."""
    sched.check_step(t)
    beta = sched.beta_at(t)
    a_bar = sched.alpha_bar_at(t)
    mean = (xt - (beta / math.sqrt(1.0 - a_bar)) * eps_pred) / math.sqrt(sched.alpha_at(t))
    if t > 1 and rng is not None:
        mean = mean + math.sqrt(beta) * complex_normal(rng, np.shape(xt))
    return mean


def predict_x0(xt: ComplexArray2D, eps_pred: ComplexArray2D, t: int, sched: NoiseSchedule) -> ComplexArray2D:
    a_bar = sched.alpha_bar_at(t)
    return (xt - math.sqrt(1.0 - a_bar) * eps_pred) / math.sqrt(a_bar)


def ddim_step(xt: ComplexArray2D, eps_pred: ComplexArray2D, t: int, sched: NoiseSchedule) -> ComplexArray2D:
    """Deterministic step t → t−1 (α in the update read as the cumulative ᾱ)."""
    sched.check_step(t)
    x0_hat = predict_x0(xt, eps_pred, t, sched)
    a_bar_prev = sched.alpha_bar_at(t - 1)
    return math.sqrt(a_bar_prev) * x0_hat + math.sqrt(1.0 - a_bar_prev) * eps_pred
