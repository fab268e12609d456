from pydantic import BaseModel, ConfigDict, Field, model_validator


class ScheduleConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    T: int = Field(100, ge=1, description="Number of diffusion steps.")
    beta_min: float = Field(1e-4, gt=0.0, lt=1.0, description="β_1 of the linear schedule.")
    beta_max: float = Field(0.02, gt=0.0, lt=1.0, description="β_T of the linear schedule.")

    @model_validator(mode="after")
    def check_order(self):
        if self.T > 1 and not self.beta_min < self.beta_max:
            raise ValueError(f"beta_min ({self.beta_min}) must be below beta_max ({self.beta_max})")
        return self
