from diffusion.loss import (
    LossResult,
    NoiseDraws,
    aid_loss,
    aid_loss_with_draws,
    batch_loss,
    draw_noise,
    noisy_targets,
    sequential_terms,
)
from diffusion.process import ddim_step, ddpm_step, predict_x0, q_posterior_params, q_sample
from diffusion.schedule import NoiseSchedule, make_schedule

__all__ = [
    "LossResult",
    "NoiseDraws",
    "NoiseSchedule",
    "aid_loss",
    "aid_loss_with_draws",
    "batch_loss",
    "ddim_step",
    "ddpm_step",
    "draw_noise",
    "make_schedule",
    "noisy_targets",
    "predict_x0",
    "q_posterior_params",
    "q_sample",
    "sequential_terms",
]
