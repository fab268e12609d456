import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from models.schedule_models import ScheduleConfig
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_BETA_MIN = 1e-4
DEFAULT_BETA_MAX = 0.02


@dataclass(frozen=True, eq=False)
class NoiseSchedule:
    """β_t, α_t, ᾱ_t and β̃_t for t = 1..T.

    Arrays are stored 0-based (``beta[0]`` is β_1). Use the accessors, which
    take the 1-based step and define ᾱ_0 = 1.
    """

    beta: NDArray[np.float64]
    alpha: NDArray[np.float64]
    alpha_bar: NDArray[np.float64]
    beta_tilde: NDArray[np.float64]

    @property
    def T(self) -> int:
        return int(self.beta.shape[0])

    @classmethod
    def from_betas(cls, betas) -> "NoiseSchedule":
        beta = np.asarray(betas, dtype=np.float64).copy()
        if beta.ndim != 1 or beta.size == 0:
            raise ConfigError("betas must be a non-empty 1-D sequence")
        if np.any(beta <= 0.0) or np.any(beta >= 1.0):
            raise ConfigError("every beta must lie in (0, 1)")
        if np.any(np.diff(beta) <= 0.0):
            raise ConfigError("betas must be strictly increasing")
        alpha = 1.0 - beta
        alpha_bar = np.cumprod(alpha)
        alpha_bar_prev = np.concatenate([[1.0], alpha_bar[:-1]])
        beta_tilde = beta * (1.0 - alpha_bar_prev) / (1.0 - alpha_bar)
        for arr in (beta, alpha, alpha_bar, beta_tilde):
            arr.setflags(write=False)
        return cls(beta=beta, alpha=alpha, alpha_bar=alpha_bar, beta_tilde=beta_tilde)

    def check_step(self, t: int, allow_zero: bool = False) -> int:
        low = 0 if allow_zero else 1
        if not isinstance(t, (int, np.integer)) or not low <= t <= self.T:
            message = f"step t={t} outside [{low}, {self.T}]"
            logger.error(message)
            raise ConfigError(message)
        return int(t)

    def beta_at(self, t: int) -> float:
        return float(self.beta[self.check_step(t) - 1])

    def alpha_at(self, t: int) -> float:
        """α_t with the convention α_0 = 1."""
        t = self.check_step(t, allow_zero=True)
        return 1.0 if t == 0 else float(self.alpha[t - 1])

    def alpha_bar_at(self, t: int) -> float:
        """ᾱ_t with the convention ᾱ_0 = 1."""
        t = self.check_step(t, allow_zero=True)
        return 1.0 if t == 0 else float(self.alpha_bar[t - 1])

    def beta_tilde_at(self, t: int) -> float:
        return float(self.beta_tilde[self.check_step(t) - 1])

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "beta_min": float(self.beta[0]),
            "beta_max": float(self.beta[-1]),
        }


def make_schedule(T: int, beta_min: float = DEFAULT_BETA_MIN, beta_max: float = DEFAULT_BETA_MAX) -> NoiseSchedule:
    """Linear β schedule from ``beta_min`` to ``beta_max`` over T steps."""
    if T < 1:
        raise ConfigError(f"T must be >= 1, got {T}")
    if not 0.0 < beta_min < beta_max < 1.0:
        message = f"need 0 < beta_min < beta_max < 1, got {beta_min}, {beta_max}"
        logger.error(message)
        raise ConfigError(message)
    return NoiseSchedule.from_betas(np.linspace(beta_min, beta_max, T))


def schedule_from_config(config: ScheduleConfig) -> NoiseSchedule:
    return make_schedule(config.T, config.beta_min, config.beta_max)
