from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.data_models import MotionRates
from models.mri_models import MaskKind
from models.recon_models import NoiseScale

SampleMode = Literal["retrospective", "prospective-warm", "prospective-cold", "boosted"]
ChainMode = Literal["ddpm", "ddim"]
PriorKind = Literal["tsc", "gaussian"]

# Short names accepted on the command line
MODE_ALIASES = {"retro": "retrospective", "warm": "prospective-warm", "cold": "prospective-cold"}


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: int = Field(0, ge=0, description="Single source of all randomness.")
    threads: int = Field(1, ge=1, description="Worker threads for batch items and posterior chains.")
    progress: bool = Field(False, description="Show tqdm progress bars on stderr.")


class TrainRunConfig(RunConfig):
    out: str = Field(..., description="Checkpoint directory.")
    data: Optional[str] = Field(None, description="Sequence container to train on.")
    synthetic: bool = Field(False, description="Train on generated phantom volumes.")
    volumes: int = Field(4, ge=1, description="Synthetic volumes to generate.")
    frames: int = Field(6, ge=2, description="Frames per synthetic volume.")
    size: int = Field(32, ge=2, description="Synthetic image size n.")
    steps: int = Field(500, ge=0)
    batch_size: int = Field(4, ge=1)
    lr: float = Field(1e-3, gt=0.0, description="Adam learning rate.")
    T: int = Field(100, ge=1)
    beta_min: float = Field(1e-4, gt=0.0, lt=1.0)
    beta_max: float = Field(0.02, gt=0.0, lt=1.0)
    embed_dim: int = Field(32, ge=1)
    layers: int = Field(2, ge=0)
    patch: int = Field(2, ge=1)
    window: int = Field(4, ge=1)
    unconditional: bool = Field(False, description="Drop the conditioning pathway (baseline model).")
    smoothing: int = Field(10, ge=1, description="Moving-average window of the smoothed loss curve.")
    motion: MotionRates = Field(default_factory=MotionRates)

    @model_validator(mode="after")
    def check_source(self):
        if not self.synthetic and not self.data:
            raise ValueError("give a dataset path or --synthetic")
        return self


class PhantomRunConfig(RunConfig):
    out: str = Field(..., description="Output sequence container.")
    size: int = Field(32, ge=2, description="Image size n.")
    frames: int = Field(6, ge=2, description="Frames x_0..x_{N-1}.")
    ellipses: int = Field(6, ge=1)
    motion: MotionRates = Field(default_factory=MotionRates)


class SampleRunConfig(RunConfig):
    checkpoint: str = Field(..., description="Checkpoint directory written by train.")
    out: str = Field(..., description="Output sequence container.")
    mode: SampleMode = Field("prospective-cold")
    frames: int = Field(8, ge=0, description="Frames to generate.")
    cond: Optional[str] = Field(None, description="Sequence container with the initial/original frames.")
    chain: ChainMode = Field("ddpm")
    window: Optional[int] = Field(None, ge=1, description="Sliding window; defaults to the trained window.")
    boost_steps: Optional[int] = Field(None, ge=1, description="Restart depth τ of boosted sampling.")

    @model_validator(mode="after")
    def check_cond(self):
        if self.mode != "prospective-cold" and not self.cond:
            raise ValueError(f"mode '{self.mode}' needs --cond")
        return self


class SimulateRunConfig(RunConfig):
    input: str = Field(..., description="Sequence container x_0..x_N.")
    out: str = Field(..., description="Output k-space container for frames 1..N.")
    mask: MaskKind = Field("equispaced-acs")
    R: float = Field(4.0, ge=1.0)
    acs_width: Optional[int] = Field(None, ge=0)
    coils: int = Field(1, ge=1)
    coil_width: float = Field(0.6, gt=0.0)
    noise: float = Field(0.0, ge=0.0, description="Per-channel k-space noise std.")
    sigma_eta: float = Field(1.0, gt=0.0, description="Noise std recorded for the likelihood.")


class ReconRunConfig(RunConfig):
    kspace: str = Field(..., description="k-space container written by simulate.")
    out: str = Field(..., description="Output directory.")
    prior: PriorKind = Field("tsc")
    checkpoint: Optional[str] = None
    x0: Optional[str] = Field(None, description="Sequence container whose first frame is x_0.")
    reference: Optional[str] = Field(None, description="Ground-truth sequence x_0..x_N for metrics.")
    T: Optional[int] = Field(None, ge=1, description="Reverse steps; defaults to the prior's schedule.")
    beta_min: float = Field(1e-4, gt=0.0, lt=1.0)
    beta_max: float = Field(0.02, gt=0.0, lt=1.0)
    lam: float = Field(1.0, gt=0.0)
    K: int = Field(5, ge=0)
    S: int = Field(10, ge=2, description="Posterior samples; confidence maps need at least 2.")
    noise_inject: bool = False
    noise_scale: NoiseScale = "cumulative"
    window: int = Field(4, ge=1)
    pad_with_x0: bool = True
    sigma_eta: Optional[float] = Field(None, gt=0.0, description="Override the recorded noise std.")
    prior_mean: float = Field(0.0, description="Gaussian prior mean (every pixel).")
    prior_var: float = Field(1.0, ge=0.0, description="Gaussian prior per-channel variance.")
    rho: float = Field(0.0, gt=-1.0, lt=1.0, description="Frame-to-frame correlation of the Gaussian prior.")
    confidence: float = Field(0.95, gt=0.0, lt=1.0)
    highlight_fraction: float = Field(0.1, ge=0.0)

    @model_validator(mode="after")
    def check_prior(self):
        if self.prior == "tsc" and not self.checkpoint:
            raise ValueError("--prior tsc needs --checkpoint")
        if not self.x0 and not self.reference:
            raise ValueError("give --x0 or --reference to supply the known first frame")
        return self


class MetricsRunConfig(RunConfig):
    recon: str = Field(..., description="Reconstructed sequence container.")
    reference: str = Field(..., description="Reference sequence container.")
    offset: int = Field(0, ge=0, description="Reference frame matching reconstruction frame 0.")


class CompareRunConfig(RunConfig):
    """Paired metric files, one pair per seed. A pair is a win when the candidate's mean NRMSE is no larger."""

    candidate: List[str] = Field(..., min_length=1, description="Metric line files of the conditioned prior.")
    baseline: List[str] = Field(..., min_length=1, description="Metric line files of the unconditioned prior.")
    min_wins: int = Field(8, ge=0, description="Wins needed to pass.")

    @model_validator(mode="after")
    def check_pairs(self):
        if len(self.candidate) != len(self.baseline):
            raise ValueError(f"{len(self.candidate)} candidate file(s) but {len(self.baseline)} baseline file(s)")
        if self.min_wins > len(self.candidate):
            raise ValueError(f"min_wins={self.min_wins} exceeds the {len(self.candidate)} pair(s) given")
        return self


class MetricRecord(BaseModel):
    """One line of the metrics stream; psnr_db is null for an exact match."""

    frame: int
    psnr_db: Optional[float]
    nrmse: float
    zero_filled_psnr_db: Optional[float] = None
    zero_filled_nrmse: Optional[float] = None
