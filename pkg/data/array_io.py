"""The AIDA array container and its JSON sidecars.

Layout, all little-endian:

    offset 0   magic  b"AIDA"
    offset 4   u32    version (1)
    offset 8   u32    dtype code (0 = c128, 1 = f64, 2 = u8)
    offset 12  u32    ndim
    offset 16  u64    dims[ndim]
    then       payload, C order; complex entries as interleaved (re, im) f64
"""

import logging
import struct
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import orjson

from utils.errors import ArrayFormatError, StorageError

logger = logging.getLogger(__name__)

MAGIC = b"AIDA"
VERSION = 1
DTYPE_CODES = {0: np.dtype("<c16"), 1: np.dtype("<f8"), 2: np.dtype("u1")}
CODE_FOR_KIND = {"c": 0, "f": 1, "u": 2, "b": 2}
FIXED_HEADER = struct.Struct("<4sIII")

PathLike = Union[str, Path]


def header_size(ndim: int) -> int:
    return FIXED_HEADER.size + 8 * ndim


def encode_array(x: np.ndarray) -> bytes:
    x = np.asarray(x)
    code = CODE_FOR_KIND.get(x.dtype.kind)
    if code is None:
        raise ArrayFormatError(f"unsupported dtype {x.dtype}", offset=8)
    payload = np.ascontiguousarray(x, dtype=DTYPE_CODES[code]).tobytes()
    dims = struct.pack(f"<{x.ndim}Q", *x.shape)
    return FIXED_HEADER.pack(MAGIC, VERSION, code, x.ndim) + dims + payload


def decode_array(blob: bytes) -> np.ndarray:
    if len(blob) < FIXED_HEADER.size:
        raise ArrayFormatError(f"header truncated ({len(blob)} bytes)", offset=len(blob))
    magic, version, code, ndim = FIXED_HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise ArrayFormatError(f"bad magic {magic!r}", offset=0)
    if version != VERSION:
        raise ArrayFormatError(f"unsupported version {version}", offset=4)
    if code not in DTYPE_CODES:
        raise ArrayFormatError(f"unknown dtype code {code}", offset=8)
    start = header_size(ndim)
    if len(blob) < start:
        raise ArrayFormatError(f"dims truncated, need {start} header bytes", offset=len(blob))
    dims = struct.unpack_from(f"<{ndim}Q", blob, FIXED_HEADER.size)
    dtype = DTYPE_CODES[code]
    expected = int(np.prod(dims, dtype=np.int64)) * dtype.itemsize
    actual = len(blob) - start
    if actual != expected:
        what = "truncated" if actual < expected else "has trailing bytes"
        raise ArrayFormatError(f"payload {what}: {actual} of {expected} bytes", offset=start + min(actual, expected))
    return np.frombuffer(blob, dtype=dtype, offset=start).reshape(dims).copy()


def save_array(path: PathLike, x: np.ndarray) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(encode_array(x))
    except OSError as e:
        logger.error(f"failed to write {path}: {e}")
        raise StorageError(f"cannot write {path}: {e}") from e
    return path


def load_array(path: PathLike) -> np.ndarray:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as e:
        logger.error(f"failed to read {path}: {e}")
        raise StorageError(f"cannot read {path}: {e}") from e
    try:
        return decode_array(blob)
    except ArrayFormatError as e:
        raise ArrayFormatError(f"{path}: {e.detail.rsplit(' at byte offset', 1)[0]}", offset=e.offset) from e


def sidecar_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def dump_json(data: Dict[str, Any]) -> bytes:
    """Deterministic JSON bytes (sorted keys, two-space indent)."""
    return orjson.dumps(data, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY)


def write_json(path: PathLike, data: Dict[str, Any]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(dump_json(data))
    except OSError as e:
        raise StorageError(f"cannot write {path}: {e}") from e
    return path


def read_json(path: PathLike) -> Dict[str, Any]:
    path = Path(path)
    try:
        return orjson.loads(path.read_bytes())
    except OSError as e:
        raise StorageError(f"cannot read {path}: {e}") from e
    except orjson.JSONDecodeError as e:
        raise ArrayFormatError(f"{path}: invalid JSON ({e.msg})", offset=e.pos) from e


def write_sidecar(path: PathLike, meta: Dict[str, Any]) -> Path:
    return write_json(sidecar_path(path), meta)


def read_sidecar(path: PathLike) -> Dict[str, Any]:
    return read_json(sidecar_path(path))
