"""TSC network checkpoints: a directory of per-tensor f64 containers plus header.json."""

import logging
from collections import OrderedDict
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from data.array_io import PathLike, load_array, read_json, save_array, write_json
from denoiser.tsc_net import TSCNetParams, tensor_shapes
from models.net_models import TSCConfig
from utils.errors import ArrayFormatError, ConfigError

logger = logging.getLogger(__name__)

HEADER_NAME = "header.json"
CHECKPOINT_FORMAT = "aid-tsc-checkpoint"
CHECKPOINT_VERSION = 1


def tensor_file(name: str) -> str:
    return f"{name}.aida"


def save_checkpoint(directory: PathLike, params: TSCNetParams, meta: Optional[Dict[str, Any]] = None) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for name, value in params.tensors.items():
        save_array(directory / tensor_file(name), value)
        entries.append({"name": name, "file": tensor_file(name), "shape": list(value.shape)})
    header = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "config": params.config.model_dump(),
        "tensors": entries,
        "meta": meta or {},
    }
    write_json(directory / HEADER_NAME, header)
    logger.info(f"saved checkpoint with {params.n_params()} parameters to {directory}")
    return directory


def load_checkpoint(directory: PathLike) -> Tuple[TSCNetParams, Dict[str, Any]]:
    """Parameters and the free-form metadata stored with them."""
    directory = Path(directory)
    header = read_json(directory / HEADER_NAME)
    if header.get("format") != CHECKPOINT_FORMAT or header.get("version") != CHECKPOINT_VERSION:
        raise ArrayFormatError(f"{directory}: not a version {CHECKPOINT_VERSION} checkpoint", offset=0)
    try:
        config = TSCConfig(**header["config"])
    except (KeyError, TypeError, ValidationError) as e:
        raise ConfigError(f"{directory}: invalid network configuration: {e}") from e

    expected = tensor_shapes(config)
    listed = [entry["name"] for entry in header.get("tensors", [])]
    if listed != list(expected):
        missing = sorted(set(expected) - set(listed))
        raise ArrayFormatError(f"{directory}: tensor list does not match configuration (missing {missing})", offset=0)

    tensors = OrderedDict()
    for name, shape in expected.items():
        value = load_array(directory / tensor_file(name))
        if value.dtype != np.float64 or value.shape != shape:
            raise ArrayFormatError(
                f"{directory}: tensor {name} is {value.dtype}{value.shape}, expected float64{shape}", offset=0
            )
        tensors[name] = value
    return TSCNetParams(config, tensors), header.get("meta", {})
