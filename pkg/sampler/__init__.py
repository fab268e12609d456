from sampler.generation import SequenceGenerator, generate_sequence, sample_frame
from sampler.metrics import nrmse, psnr
from sampler.reconstruction import (
    PosteriorReconstructor,
    PosteriorSamples,
    noise_scale,
    reconstruct,
    reconstruct_frame,
)
from sampler.uncertainty import UncertaintyMap, highlight_mask, mmse_and_ci, summarize, t_score

__all__ = [
    "PosteriorReconstructor",
    "PosteriorSamples",
    "SequenceGenerator",
    "UncertaintyMap",
    "generate_sequence",
    "highlight_mask",
    "mmse_and_ci",
    "noise_scale",
    "nrmse",
    "psnr",
    "reconstruct",
    "reconstruct_frame",
    "sample_frame",
    "summarize",
    "t_score",
]
