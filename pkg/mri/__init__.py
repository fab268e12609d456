from mri.coils import CoilSensitivities, max_gradient, synth_coils
from mri.masks import SamplingMask, make_mask, mask_from_lines
from mri.operator import (
    ForwardModel,
    KSpaceFrame,
    apply_adjoint,
    apply_forward,
    build_forward_model,
    likelihood_grad,
    log_likelihood,
    simulate_kspace,
    zero_filled,
)

__all__ = [
    "CoilSensitivities",
    "ForwardModel",
    "KSpaceFrame",
    "SamplingMask",
    "apply_adjoint",
    "apply_forward",
    "build_forward_model",
    "likelihood_grad",
    "log_likelihood",
    "make_mask",
    "mask_from_lines",
    "max_gradient",
    "simulate_kspace",
    "synth_coils",
    "zero_filled",
]
