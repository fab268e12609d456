"""Temporal-spatial conditioning network with frame-level tokens.

Each clean conditioning frame x_j becomes one token (average-pooled
real/imaginary patches, linearly embedded). L blocks of causal
self-attention and feed-forward layers run over those tokens, so the
summary at row j depends only on x_0..x_j. Target position n = j + 1 adds
that summary to the embedding of its noisy frame and the time embedding,
then a feed-forward head and an output projection give ε̂. A per-step
skip gain multiplies the noisy frame pixel-wise and is added to the output.
"""

import logging
from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, List

import numpy as np
from numpy.typing import NDArray

from denoiser import autodiff as ad
from denoiser.base import Denoiser, DenoiserContext
from models.net_models import TSCConfig
from numerics.arrays import ComplexArray2D, from_channels, to_channels
from utils.errors import ConfigError, DimensionError, NumericError

logger = logging.getLogger(__name__)


def tensor_shapes(config: TSCConfig) -> "OrderedDict[str, tuple]":
    """Name → shape for every weight, in checkpoint order."""
    d, h = config.embed_dim, config.hidden_dim
    shapes = OrderedDict()
    shapes["time.table"] = (config.T, d)
    shapes["embed.noisy"] = (config.token_features, d)
    if config.conditional:
        shapes["embed.cond"] = (config.token_features, d)
        for layer in range(config.layers):
            prefix = f"layers.{layer}"
            for proj in ("wq", "wk", "wv", "wo"):
                shapes[f"{prefix}.{proj}"] = (d, d)
            shapes[f"{prefix}.ffn.w1"] = (d, h)
            shapes[f"{prefix}.ffn.b1"] = (1, h)
            shapes[f"{prefix}.ffn.w2"] = (h, d)
            shapes[f"{prefix}.ffn.b2"] = (1, d)
    shapes["head.w1"] = (d, h)
    shapes["head.b1"] = (1, h)
    shapes["head.w2"] = (h, d)
    shapes["head.b2"] = (1, d)
    shapes["out.w"] = (d, config.pixel_features)
    shapes["out.skip"] = (config.T, 1)
    return shapes


@dataclass(eq=False)
class TSCNetParams:
    config: TSCConfig
    tensors: "OrderedDict[str, NDArray[np.float64]]"

    def __post_init__(self):
        expected = tensor_shapes(self.config)
        if list(self.tensors) != list(expected):
            raise ConfigError(f"parameter names {list(self.tensors)} do not match configuration {list(expected)}")
        for name, shape in expected.items():
            value = np.asarray(self.tensors[name], dtype=np.float64)
            if value.shape != shape:
                raise DimensionError(f"parameter {name} has shape {value.shape}, expected {shape}")
            if not np.all(np.isfinite(value)):
                raise NumericError("parameter contains NaN or Inf", where=name)
            self.tensors[name] = value

    @classmethod
    def init(cls, config: TSCConfig, rng: np.random.Generator) -> "TSCNetParams":
        """Small normal weights, zero biases, zero skip gains."""
        tensors = OrderedDict()
        for name, shape in tensor_shapes(config).items():
            if name.endswith((".b1", ".b2")) or name == "out.skip":
                tensors[name] = np.zeros(shape)
            else:
                tensors[name] = config.init_scale * rng.standard_normal(shape)
        return cls(config, tensors)

    @classmethod
    def zeros(cls, config: TSCConfig) -> "TSCNetParams":
        return cls(config, OrderedDict((n, np.zeros(s)) for n, s in tensor_shapes(config).items()))

    def zeros_like(self) -> "TSCNetParams":
        return TSCNetParams.zeros(self.config)

    def copy(self) -> "TSCNetParams":
        return TSCNetParams(self.config, OrderedDict((n, v.copy()) for n, v in self.tensors.items()))

    def names(self) -> List[str]:
        return list(self.tensors)

    def n_params(self) -> int:
        return int(sum(v.size for v in self.tensors.values()))

    def to_vector(self) -> NDArray[np.float64]:
        return np.concatenate([v.ravel() for v in self.tensors.values()])

    def from_vector(self, vector: NDArray[np.float64]) -> "TSCNetParams":
        vector = np.asarray(vector, dtype=np.float64)
        if vector.shape != (self.n_params(),):
            raise DimensionError(f"vector of length {vector.shape} does not match {self.n_params()} parameters")
        tensors, offset = OrderedDict(), 0
        for name, value in self.tensors.items():
            tensors[name] = vector[offset:offset + value.size].reshape(value.shape).copy()
            offset += value.size
        return TSCNetParams(self.config, tensors)

    def zero_output(self) -> "TSCNetParams":
        """Copy with the output projection (and skip gains) zeroed."""
        params = self.copy()
        params.tensors["out.w"][:] = 0.0
        params.tensors["out.skip"][:] = 0.0
        return params

    def add_scaled(self, other: "TSCNetParams", factor: float = 1.0) -> "TSCNetParams":
        return TSCNetParams(
            self.config,
            OrderedDict((n, v + factor * other.tensors[n]) for n, v in self.tensors.items()),
        )


# Gradients share the parameter tree
ParamGradients = TSCNetParams


def pool_frames(frames: NDArray[np.complex128], patch: int) -> NDArray[np.float64]:
    """(k, n, n) complex → (k, 2(n/patch)²) real token features."""
    _, rows, cols = frames.shape
    pooled = np.stack(
        [frame.reshape(rows // patch, patch, cols // patch, patch).mean(axis=(1, 3)) for frame in frames]
    )
    return to_channels(pooled)


def _feed_forward(x: ad.Tensor, w1, b1, w2, b2) -> ad.Tensor:
    with ad.scope("ffn"):
        return ad.matmul(ad.tanh(ad.matmul(x, w1) + b1), w2) + b2


def _cond_summaries(p: Dict[str, ad.Tensor], config: TSCConfig, cond_frames) -> ad.Tensor:
    h = ad.matmul(pool_frames(cond_frames, config.patch), p["embed.cond"])
    for layer in range(config.layers):
        prefix = f"layers.{layer}"
        with ad.scope(prefix):
            normed = ad.layer_norm(h)
            attended = ad.causal_attention(
                ad.matmul(normed, p[f"{prefix}.wq"]),
                ad.matmul(normed, p[f"{prefix}.wk"]),
                ad.matmul(normed, p[f"{prefix}.wv"]),
            )
            h = h + ad.matmul(attended, p[f"{prefix}.wo"])
            h = h + _feed_forward(
                ad.layer_norm(h),
                p[f"{prefix}.ffn.w1"], p[f"{prefix}.ffn.b1"],
                p[f"{prefix}.ffn.w2"], p[f"{prefix}.ffn.b2"],
            )
    return h


def forward_rows(
    p: Dict[str, ad.Tensor],
    config: TSCConfig,
    cond_frames: NDArray[np.complex128],
    noisy: NDArray[np.complex128],
    ts: NDArray[np.int64],
) -> ad.Tensor:
    """ε̂ as a (k, 2n²) channel matrix; row i uses cond_frames[:i+1] and noisy[i]."""
    index = np.asarray(ts, dtype=np.int64) - 1
    if np.any(index < 0) or np.any(index >= config.T):
        raise ConfigError(f"time steps must lie in [1, {config.T}], got {np.asarray(ts).tolist()}")
    z = ad.matmul(pool_frames(noisy, config.patch), p["embed.noisy"]) + ad.take_rows(p["time.table"], index)
    if config.conditional:
        with ad.scope("cond"):
            z = z + _cond_summaries(p, config, cond_frames)
    with ad.scope("head"):
        z = z + _feed_forward(ad.layer_norm(z), p["head.w1"], p["head.b1"], p["head.w2"], p["head.b2"])
    with ad.scope("out"):
        skip = ad.mul(ad.take_rows(p["out.skip"], index), to_channels(noisy))
        return ad.matmul(z, p["out.w"]) + skip


def leaf_tensors(params: TSCNetParams) -> Dict[str, ad.Tensor]:
    return {name: ad.Tensor(value, name=name) for name, value in params.tensors.items()}


def check_frames(config: TSCConfig, frames: np.ndarray, what: str) -> None:
    if frames.ndim != 3 or frames.shape[1:] != (config.image_size, config.image_size):
        message = f"{what} must be (k, {config.image_size}, {config.image_size}), got {frames.shape}"
        logger.error(message)
        raise DimensionError(message)


def tsc_forward(params: TSCNetParams, xt: ComplexArray2D, t: int, ctx: DenoiserContext) -> ComplexArray2D:
    """ε̂ for one noisy frame at position ``ctx.position`` given its clean predecessors."""
    return TSCNet(params).predict_eps(xt, t, ctx)


class TSCNet(Denoiser):
    def __init__(self, params: TSCNetParams):
        self.params = params
        self.config = params.config

    def predict_parallel(self, cond_frames, noisy, ts) -> NDArray[np.complex128]:
        cond_frames = np.asarray(cond_frames, dtype=np.complex128)
        noisy = np.asarray(noisy, dtype=np.complex128)
        check_frames(self.config, cond_frames, "conditioning frames")
        check_frames(self.config, noisy, "noisy frames")
        if not (len(cond_frames) == len(noisy) == len(ts)):
            raise DimensionError(f"parallel inputs disagree in length: {len(cond_frames)}, {len(noisy)}, {len(ts)}")
        out = forward_rows(leaf_tensors(self.params), self.config, cond_frames, noisy, ts)
        n = self.config.image_size
        return from_channels(out.value, n, n)

    def predict_eps(self, xt: ComplexArray2D, t: int, ctx: DenoiserContext) -> ComplexArray2D:
        xt = self.check_inputs(xt, ctx)
        cond = ctx.cond_frames
        # Every conditioning row is computed, only the last one feeds the target
        noisy = np.zeros_like(cond)
        noisy[-1] = xt
        ts = np.ones(len(cond), dtype=np.int64)
        ts[-1] = t
        return self.predict_parallel(cond, noisy, ts)[-1]
