"""Deterministic random streams.

A stream is the pair ``(seed, stream_id)``. It keys numpy's counter-based
Philox generator directly (key word 0 = seed, key word 1 = stream_id), so
the same pair always yields the same draws and different stream ids are
independent Philox keys. Child ids come from ``SeedSequence`` spawning,
which makes splitting deterministic and independent of the order in
which children are requested.
"""

from dataclasses import dataclass

import numpy as np

from utils.errors import ConfigError

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= self.seed <= _MASK64 and 0 <= self.stream_id <= _MASK64):
            raise ConfigError(f"seed and stream_id must be unsigned 64-bit, got {self.seed}, {self.stream_id}")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def spawn(self, index: int) -> "RngStream":
        """Child stream number ``index``."""
        if index < 0:
            raise ConfigError(f"child index must be >= 0, got {index}")
        seq = np.random.SeedSequence(entropy=[self.seed, self.stream_id], spawn_key=(index,))
        child_id = int(seq.generate_state(1, dtype=np.uint64)[0])
        return RngStream(self.seed, child_id)

    def named(self, label: str) -> "RngStream":
        """Child stream keyed by a short label (e.g. "phantom", "coils")."""
        index = int.from_bytes(label.encode("utf-8")[:8].ljust(8, b"\0"), "little") & 0x7FFFFFFFFFFFFFFF
        return self.spawn(index)
