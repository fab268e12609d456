"""SENSE-style forward model A = P·F·S, its adjoint and the likelihood gradient.

Noise convention: every sampled k-space entry carries independent N(0, σ_η²)
noise on its real and imaginary channels, so

    log p(y | x) = −‖y − A x‖² / (2 σ_η²) + const

and its gradient over the real coordinates (Re x, Im x), packed back into a
complex array, is A^H (y − A x) / σ_η².
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from models.mri_models import ForwardConfig
from mri.coils import CoilSensitivities, synth_coils
from mri.masks import SamplingMask, make_mask
from numerics.arrays import ComplexArray2D, as_complex_image, complex_normal
from numerics.fft import fft2, ifft2
from numerics.rng import RngStream
from utils.errors import ConfigError, DimensionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ForwardModel:
    mask: SamplingMask
    coils: CoilSensitivities
    sigma_eta: float = 1.0

    def __post_init__(self):
        if self.mask.shape != tuple(self.coils.shape):
            raise DimensionError(
                f"mask shape {self.mask.shape} does not match coil map shape {tuple(self.coils.shape)}"
            )
        if not self.sigma_eta > 0:
            raise ConfigError(f"sigma_eta must be positive, got {self.sigma_eta}")

    @property
    def image_shape(self):
        return self.mask.shape

    @property
    def kspace_shape(self):
        return (self.coils.n_coils,) + self.mask.shape

    def with_sigma(self, sigma_eta: float) -> "ForwardModel":
        return ForwardModel(self.mask, self.coils, sigma_eta)


@dataclass(frozen=True, eq=False)
class KSpaceFrame:
    data: NDArray[np.complex128]
    model: ForwardModel

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.complex128)
        if data.shape != self.model.kspace_shape:
            raise DimensionError(f"k-space shape {data.shape} does not match model {self.model.kspace_shape}")
        # Unsampled entries are stored as exact zeros
        data = self.model.mask.apply(data)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def sampled_count(self) -> int:
        return int(self.model.mask.lines.sum()) * self.model.mask.cols * self.model.coils.n_coils


def _check_image(model: ForwardModel, x) -> ComplexArray2D:
    x = as_complex_image(x)
    if x.shape != model.image_shape:
        message = f"image shape {x.shape} does not match forward model {model.image_shape}"
        logger.error(message)
        raise DimensionError(message)
    return x


def _kspace_data(model: ForwardModel, y) -> NDArray[np.complex128]:
    if isinstance(y, KSpaceFrame):
        if y.model.kspace_shape != model.kspace_shape:
            raise DimensionError(f"k-space frame shape {y.model.kspace_shape} does not match {model.kspace_shape}")
        return y.data
    data = np.asarray(y, dtype=np.complex128)
    if data.shape != model.kspace_shape:
        raise DimensionError(f"k-space shape {data.shape} does not match model {model.kspace_shape}")
    return data


def forward_data(model: ForwardModel, x: ComplexArray2D) -> NDArray[np.complex128]:
    x = _check_image(model, x)
    return model.mask.apply(fft2(model.coils.maps * x[None]))


def apply_forward(model: ForwardModel, x: ComplexArray2D) -> KSpaceFrame:
    """Per coil: mask ⊙ fft2(S_c ⊙ x)."""
    return KSpaceFrame(forward_data(model, x), model)


def apply_adjoint(model: ForwardModel, y) -> ComplexArray2D:
    """Σ_c conj(S_c) ⊙ ifft2(mask ⊙ y_c)."""
    data = model.mask.apply(_kspace_data(model, y))
    return np.sum(np.conj(model.coils.maps) * ifft2(data), axis=0)


def likelihood_grad(model: ForwardModel, y, x: ComplexArray2D) -> ComplexArray2D:
    """A^H (y − A x) / σ_η², the ascent direction of log p(y | x)."""
    if not model.sigma_eta > 0:
        raise ConfigError(f"sigma_eta must be positive, got {model.sigma_eta}")
    residual = _kspace_data(model, y) - forward_data(model, x)
    return apply_adjoint(model, residual) / model.sigma_eta ** 2


def log_likelihood(model: ForwardModel, y, x: ComplexArray2D) -> float:
    """−‖y − A x‖² / (2 σ_η²), dropping the constant."""
    residual = _kspace_data(model, y) - forward_data(model, x)
    return -float(np.vdot(residual, residual).real) / (2.0 * model.sigma_eta ** 2)


def zero_filled(model: ForwardModel, y) -> ComplexArray2D:
    """Coil-combined zero-filled reconstruction Σ_c conj(S_c)·ifft2(y_c) / Σ_c|S_c|²."""
    combined = apply_adjoint(model, y)
    return combined / np.maximum(model.coils.sum_of_squares(), np.finfo(np.float64).tiny)


def simulate_kspace(
    model: ForwardModel,
    x: ComplexArray2D,
    noise_std: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> KSpaceFrame:
    """A x plus per-channel N(0, noise_std²) noise on the sampled entries."""
    data = forward_data(model, x)
    if noise_std < 0:
        raise ConfigError(f"noise_std must be >= 0, got {noise_std}")
    if noise_std > 0:
        if rng is None:
            raise ConfigError("a random generator is needed to add k-space noise")
        data = data + noise_std * complex_normal(rng, data.shape)
    return KSpaceFrame(data, model)


def build_forward_model(config: ForwardConfig, n: int, stream: RngStream) -> ForwardModel:
    """Mask and coil maps drawn from named children of ``stream``."""
    mask = make_mask(
        config.mask.kind,
        n,
        R=config.mask.R,
        acs_width=config.mask.resolved_acs_width(n) if config.mask.kind.endswith("-acs") else 0,
        rng=stream.named("mask").generator(),
    )
    coils = synth_coils(
        n,
        config.coils.n_coils,
        stream.named("coils"),
        width=config.coils.width,
        smoothness_bound=config.coils.smoothness_bound,
    )
    return ForwardModel(mask, coils, config.sigma_eta)
