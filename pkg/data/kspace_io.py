"""Image sequences and k-space stacks on disk.

A k-space stack at ``k.aida`` is stored as four files: the (frames, coils,
rows, cols) data, ``k.mask.aida`` (u8 rows × cols), ``k.coils.aida``
(c128 coils × rows × cols) and the sidecar ``k.aida.json``.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from data.array_io import PathLike, load_array, read_sidecar, save_array, write_sidecar
from data.sequence import ImageSequence
from mri.coils import CoilSensitivities
from mri.masks import mask_from_lines
from mri.operator import ForwardModel, KSpaceFrame
from utils.errors import ArrayFormatError, DimensionError


def save_sequence(path: PathLike, seq: ImageSequence, meta: Optional[Dict[str, Any]] = None) -> Path:
    path = save_array(path, seq.frames)
    if meta is not None:
        write_sidecar(path, meta)
    return path


def load_sequence(path: PathLike) -> ImageSequence:
    frames = load_array(path)
    if frames.dtype != np.complex128:
        frames = frames.astype(np.complex128)
    if frames.ndim == 2:
        frames = frames[None]
    if frames.ndim != 3:
        raise DimensionError(f"{path}: expected a (frames, rows, cols) container, got {frames.shape}")
    return ImageSequence(frames)


def sibling(path: PathLike, part: str) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}.{part}{path.suffix}")


def save_kspace(path: PathLike, frames: List[KSpaceFrame], meta: Optional[Dict[str, Any]] = None) -> Path:
    if not frames:
        raise DimensionError("no k-space frames to save")
    model = frames[0].model
    path = save_array(path, np.stack([f.data for f in frames]))
    save_array(sibling(path, "mask"), model.mask.kept)
    save_array(sibling(path, "coils"), model.coils.maps)
    sidecar = {
        "sigma_eta": model.sigma_eta,
        "mask_kind": model.mask.kind,
        "R": model.mask.R,
        "acs_width": model.mask.acs_width,
        "n_frames": len(frames),
    }
    sidecar.update(meta or {})
    write_sidecar(path, sidecar)
    return path


def load_kspace(path: PathLike, sigma_eta: Optional[float] = None) -> List[KSpaceFrame]:
    data = load_array(path)
    if data.ndim != 4:
        raise DimensionError(f"{path}: expected (frames, coils, rows, cols) k-space, got {data.shape}")
    meta = read_sidecar(path)
    kept = load_array(sibling(path, "mask"))
    maps = load_array(sibling(path, "coils"))
    if kept.shape != data.shape[2:] or maps.shape != data.shape[1:]:
        raise ArrayFormatError(
            f"{path}: mask {kept.shape} / coils {maps.shape} do not fit k-space {data.shape}", offset=0
        )
    mask = mask_from_lines(
        kept,
        cols=kept.shape[1],
        kind=meta.get("mask_kind", "full"),
        R=float(meta.get("R", 1.0)),
        acs_width=int(meta.get("acs_width", 0)),
    )
    model = ForwardModel(mask, CoilSensitivities(maps), sigma_eta if sigma_eta is not None else meta.get("sigma_eta", 1.0))
    return [KSpaceFrame(frame, model) for frame in data]
