from pydantic import BaseModel, ConfigDict, Field, field_validator


class MotionRates(BaseModel):
    """Per-frame drift of the phantom geometry."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    translation: float = Field(0.01, description="Shift per frame, fraction of the field of view.")
    rotation_deg: float = Field(1.0, description="Rotation per frame in degrees.")
    intensity: float = Field(0.02, description="Relative intensity drift per frame.")
    scale: float = Field(0.005, description="Relative axis growth per frame.")
    phase: float = Field(0.02, description="Global phase advance per frame, radians.")

    @field_validator("*")
    @classmethod
    def finite(cls, v: float) -> float:
        if v != v or v in (float("inf"), float("-inf")):
            raise ValueError("motion rates must be finite")
        return v

    @classmethod
    def still(cls) -> "MotionRates":
        return cls(translation=0.0, rotation_deg=0.0, intensity=0.0, scale=0.0, phase=0.0)


class PhaseProfile(BaseModel):
    """Smooth phase φ(x, y) = a·x + b·y + c·(x² + y²), radians."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    linear_x: float = Field(0.6)
    linear_y: float = Field(-0.4)
    quadratic: float = Field(0.8)


class PhantomSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    n: int = Field(32, ge=2, description="Image side length (power of two).")
    N: int = Field(6, ge=2, description="Frame count.")
    n_ellipses: int = Field(6, ge=1, description="Inner ellipses inside the outer shell.")
    motion: MotionRates = Field(default_factory=MotionRates)
    phase_profile: PhaseProfile = Field(default_factory=PhaseProfile)

    @field_validator("n")
    @classmethod
    def power_of_two(cls, v: int) -> int:
        if v & (v - 1):
            raise ValueError(f"n must be a power of two, got {v}")
        return v
