from pydantic import BaseModel, ConfigDict, Field, model_validator


class TSCConfig(BaseModel):
    """Hyperparameters of the temporal-spatial conditioning network."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    image_size: int = Field(32, ge=1, description="Image side length n.")
    patch: int = Field(2, ge=1, description="Token patch size; n must be divisible by it.")
    embed_dim: int = Field(32, ge=1, description="Token width d.")
    layers: int = Field(2, ge=0, description="Causal attention blocks L.")
    ffn_mult: int = Field(2, ge=1, description="Feed-forward hidden width as a multiple of d.")
    window: int = Field(4, ge=1, description="Conditioning frames seen by the attention.")
    T: int = Field(100, ge=1, description="Time-embedding table length.")
    conditional: bool = Field(True, description="False drops the conditioning pathway (baseline).")
    init_scale: float = Field(0.02, gt=0.0, description="Std of the initial weights.")

    @model_validator(mode="after")
    def check_patch(self):
        if self.image_size % self.patch != 0:
            raise ValueError(f"image_size {self.image_size} not divisible by patch {self.patch}")
        return self

    @property
    def pixel_features(self) -> int:
        return 2 * self.image_size * self.image_size

    @property
    def token_features(self) -> int:
        return 2 * (self.image_size // self.patch) ** 2

    @property
    def hidden_dim(self) -> int:
        return self.ffn_mult * self.embed_dim


class AdamConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    lr: float = Field(1e-4, gt=0.0, description="Learning rate.")
    beta1: float = Field(0.9, ge=0.0, lt=1.0)
    beta2: float = Field(0.999, ge=0.0, lt=1.0)
    eps: float = Field(1e-8, gt=0.0)
