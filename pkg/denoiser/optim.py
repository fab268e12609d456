import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from denoiser.tsc_net import ParamGradients, TSCNetParams
from models.net_models import AdamConfig
from utils.errors import ConfigError, DimensionError


@dataclass(eq=False)
class AdamState:
    m: TSCNetParams
    v: TSCNetParams
    step: int = 0

    @classmethod
    def init(cls, params: TSCNetParams) -> "AdamState":
        return cls(m=params.zeros_like(), v=params.zeros_like(), step=0)


def train_step(
    params: TSCNetParams,
    grads: ParamGradients,
    state: AdamState,
    lr: Optional[float] = None,
    config: AdamConfig = AdamConfig(),
) -> Tuple[TSCNetParams, AdamState]:
    """One bias-corrected Adam update; inputs are left untouched."""
    lr = config.lr if lr is None else lr
    if not lr > 0:
        raise ConfigError(f"learning rate must be positive, got {lr}")
    if grads.names() != params.names():
        raise DimensionError("gradient tree does not match parameter tree")

    step = state.step + 1
    correction1 = 1.0 - config.beta1 ** step
    correction2 = 1.0 - config.beta2 ** step
    new_params, new_m, new_v = OrderedDict(), OrderedDict(), OrderedDict()
    for name, value in params.tensors.items():
        g = grads.tensors[name]
        if g.shape != value.shape:
            raise DimensionError(f"gradient {name} has shape {g.shape}, expected {value.shape}")
        m = config.beta1 * state.m.tensors[name] + (1.0 - config.beta1) * g
        v = config.beta2 * state.v.tensors[name] + (1.0 - config.beta2) * g * g
        update = (m / correction1) / (np.sqrt(v / correction2) + config.eps)
        new_params[name] = value - lr * update
        new_m[name], new_v[name] = m, v
    return (
        TSCNetParams(params.config, new_params),
        AdamState(TSCNetParams(params.config, new_m), TSCNetParams(params.config, new_v), step),
    )


def first_step_update(g: np.ndarray, lr: float, eps: float = 1e-8) -> np.ndarray:
    """Closed form of the first Adam step from zero moments: −lr·g/(|g| + eps)."""
    return -lr * g / (np.abs(g) + eps)


def global_grad_norm(grads: ParamGradients) -> float:
    return math.sqrt(math.fsum(float(np.sum(g * g)) for g in grads.tensors.values()))
