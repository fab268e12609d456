from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

NoiseScale = Literal["cumulative", "per_step"]


class ReconConfig(BaseModel):
    """Posterior sampling parameters: reverse steps, data steps and chain count."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    T: int = Field(1000, ge=1, description="Reverse steps.")
    lam: float = Field(1.0, gt=0.0, description="Data-fidelity step size λ.")
    K: int = Field(5, ge=0, description="Data-fidelity iterations per step.")
    S: int = Field(10, ge=1, description="Posterior samples per frame.")
    noise_inject: bool = Field(False, description="Add Gaussian noise after each data-fidelity step.")
    noise_scale: NoiseScale = Field(
        "cumulative", description="cumulative: √(1−ᾱ_{t−1}); per_step: √(1−α_{t−1})."
    )
    window: int = Field(4, ge=1, description="Conditioning frames kept for the prior.")
    pad_with_x0: bool = Field(True, description="Front-pad short conditioning windows with copies of x_0.")
