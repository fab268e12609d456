"""Cartesian line masks.

Masks select whole k-space rows (phase-encode lines). The k-space origin
is at row 0, so the ACS band is the ``acs_width`` rows centred on row 0
modulo n, which is contiguous and centred after an fftshift.
"""

import logging
from dataclasses import dataclass
from typing import Optional, get_args

import numpy as np
from numpy.typing import NDArray

from models.mri_models import MaskKind
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

VALID_MASK_KINDS = set(get_args(MaskKind))


@dataclass(frozen=True, eq=False)
class SamplingMask:
    rows: int
    cols: int
    kind: str
    lines: NDArray[np.bool_]
    R: float = 1.0
    acs_width: int = 0

    @property
    def kept(self) -> NDArray[np.uint8]:
        """Binary (rows, cols) matrix, 1 = sampled."""
        return np.repeat(self.lines.astype(np.uint8)[:, None], self.cols, axis=1)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def apply(self, k: np.ndarray) -> np.ndarray:
        """Zero every unsampled row (over the last two axes)."""
        return np.where(self.lines[:, None], k, 0.0 + 0.0j)

    def kept_fraction(self) -> float:
        return float(self.lines.mean())

    def acs_rows(self) -> NDArray[np.int64]:
        return acs_rows(self.rows, self.acs_width)


def acs_rows(n: int, acs_width: int) -> NDArray[np.int64]:
    return (np.arange(acs_width) - acs_width // 2) % n


def _validate_kind(kind: str) -> str:
    if kind not in VALID_MASK_KINDS:
        error_msg = f"Invalid mask kind: '{kind}'. Valid values: {sorted(VALID_MASK_KINDS)}"
        logger.error(error_msg)
        raise ConfigError(error_msg)
    return kind


def make_mask(
    kind: str,
    n: int,
    R: float = 1.0,
    acs_width: int = 0,
    rng: Optional[np.random.Generator] = None,
    cols: Optional[int] = None,
) -> SamplingMask:
    """Build a line mask of the requested kind for an n-row k-space."""
    _validate_kind(kind)
    cols = n if cols is None else cols
    if R < 1.0:
        raise ConfigError(f"undersampling factor must be >= 1, got {R}")
    if R > n:
        raise ConfigError(f"undersampling factor {R} exceeds the line count {n}")
    if not 0 <= acs_width < n:
        raise ConfigError(f"acs_width must lie in [0, {n}), got {acs_width}")

    lines = np.zeros(n, dtype=bool)
    with_acs = kind.endswith("-acs")
    acs = acs_rows(n, acs_width) if with_acs else np.array([], dtype=np.int64)

    if kind == "full":
        lines[:] = True
        R, acs_width = 1.0, 0
    elif kind == "odd-lines":
        # 1-based odd lines are the even 0-based rows
        lines[::2] = True
        R, acs_width = 2.0, 0
    elif kind.startswith("equispaced"):
        lines[::max(1, round(R))] = True
        lines[acs] = True
    else:
        if rng is None:
            raise ConfigError(f"mask kind '{kind}' needs a random generator")
        candidates = np.setdiff1d(np.arange(n), acs)
        target = min(len(candidates), max(1, round(n / R)))
        # Without replacement so the achieved acceleration is exact
        chosen = rng.choice(candidates, size=target, replace=False)
        lines[chosen] = True
        lines[acs] = True

    if not with_acs and kind not in ("full",):
        acs_width = 0
    lines.setflags(write=False)
    mask = SamplingMask(rows=n, cols=cols, kind=kind, lines=lines, R=float(R), acs_width=int(acs_width))
    logger.debug(f"mask {kind} n={n} R={R} acs={acs_width} kept={mask.kept_fraction():.3f}")
    return mask


def mask_from_lines(lines: np.ndarray, cols: int, kind: str = "full", R: float = 1.0, acs_width: int = 0) -> SamplingMask:
    """Rebuild a mask from stored data (rows flagged by any sampled entry)."""
    lines = np.asarray(lines)
    if lines.ndim == 2:
        lines = lines.any(axis=1)
    lines = lines.astype(bool)
    lines.setflags(write=False)
    return SamplingMask(rows=lines.shape[0], cols=cols, kind=_validate_kind(kind), lines=lines, R=R, acs_width=acs_width)
