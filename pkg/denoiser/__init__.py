from denoiser.autodiff import Tensor, causal_attention
from denoiser.base import Denoiser, DenoiserContext
from denoiser.gaussian import (
    GaussianMarkovOracle,
    GaussianOracle,
    GaussianPriorSpec,
    gaussian_eps,
    posterior_mean_x0,
)
from denoiser.optim import AdamState, train_step
from denoiser.trainer import Trainer, TrainResult, grad_params, moving_average, sequence_grad
from denoiser.tsc_net import ParamGradients, TSCNet, TSCNetParams, tensor_shapes, tsc_forward

__all__ = [
    "AdamState",
    "Denoiser",
    "DenoiserContext",
    "GaussianMarkovOracle",
    "GaussianOracle",
    "GaussianPriorSpec",
    "ParamGradients",
    "TSCNet",
    "TSCNetParams",
    "Tensor",
    "TrainResult",
    "Trainer",
    "causal_attention",
    "gaussian_eps",
    "grad_params",
    "moving_average",
    "posterior_mean_x0",
    "sequence_grad",
    "tensor_shapes",
    "train_step",
    "tsc_forward",
]
