import logging
from pathlib import Path
from typing import Union

import numpy as np

from utils.errors import DimensionError, StorageError

logger = logging.getLogger(__name__)

MAXVAL = 65535


def pgm_bytes(x: np.ndarray) -> bytes:
    """Binary 16-bit PGM of |x|, min-max scaled to 0..65535."""
    magnitude = np.abs(np.asarray(x))
    if magnitude.ndim != 2:
        raise DimensionError(f"preview needs a 2-D image, got shape {magnitude.shape}")
    low, high = float(magnitude.min()), float(magnitude.max())
    if high > low:
        scaled = np.rint((magnitude - low) / (high - low) * MAXVAL)
    else:
        scaled = np.zeros_like(magnitude, dtype=np.float64)
    rows, cols = magnitude.shape
    header = f"P5\n{cols} {rows}\n{MAXVAL}\n".encode("ascii")
    return header + scaled.astype(">u2").tobytes()


def export_pgm(path: Union[str, Path], x: np.ndarray) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(pgm_bytes(x))
    except OSError as e:
        logger.error(f"failed to write preview {path}: {e}")
        raise StorageError(f"cannot write {path}: {e}") from e
    return path
