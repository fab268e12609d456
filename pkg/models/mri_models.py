from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

MaskKind = Literal[
    "random-acs",
    "random-noacs",
    "equispaced-acs",
    "equispaced-noacs",
    "odd-lines",
    "full",
]

ACS_WIDTH_AT_320 = 16


class MaskConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: MaskKind = Field("equispaced-acs", description="Line pattern of the sampling mask.")
    R: float = Field(4.0, ge=1.0, description="Undersampling factor (full / acquired lines).")
    acs_width: Optional[int] = Field(
        None, ge=0, description="Centered fully sampled rows; None scales 16 rows at n=320."
    )

    def resolved_acs_width(self, n: int) -> int:
        if self.acs_width is not None:
            return self.acs_width
        return max(1, round(ACS_WIDTH_AT_320 * n / 320))


class CoilConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    n_coils: int = Field(1, ge=1, description="Receive coil count m_C.")
    width: float = Field(0.6, gt=0.0, description="Gaussian bump width, in units of the field of view.")
    smoothness_bound: float = Field(
        10.0, gt=0.0, description="Max gradient magnitude of a coil map over a field of view of width 2."
    )


class ForwardConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    mask: MaskConfig = Field(default_factory=MaskConfig)
    coils: CoilConfig = Field(default_factory=CoilConfig)
    sigma_eta: float = Field(1.0, gt=0.0, description="k-space noise std used by the likelihood.")
    noise_std: float = Field(0.0, ge=0.0, description="Std of the noise added when simulating k-space.")
