"""Ellipse-composite phantom sequences with slow geometric drift and smooth phase."""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from data.sequence import ImageSequence
from models.data_models import PhantomSpec
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

BODY_AXES = (0.72, 0.92)
BODY_INTENSITY = 0.3


@dataclass(frozen=True)
class Ellipse:
    x0: float
    y0: float
    a: float
    b: float
    theta: float
    intensity: float

    def mask(self, xx: np.ndarray, yy: np.ndarray) -> NDArray[np.bool_]:
        c, s = np.cos(self.theta), np.sin(self.theta)
        dx, dy = xx - self.x0, yy - self.y0
        u = (dx * c + dy * s) / self.a
        v = (-dx * s + dy * c) / self.b
        return u * u + v * v <= 1.0


def random_ellipses(spec: PhantomSpec, rng: np.random.Generator):
    """Inner ellipses plus a drift direction and intensity sign for each."""
    ellipses, directions, signs = [], [], []
    for _ in range(spec.n_ellipses):
        ellipses.append(Ellipse(
            x0=rng.uniform(-0.4, 0.4),
            y0=rng.uniform(-0.5, 0.5),
            a=rng.uniform(0.08, 0.3),
            b=rng.uniform(0.08, 0.3),
            theta=rng.uniform(0.0, np.pi),
            intensity=rng.uniform(0.1, 0.5),
        ))
        angle = rng.uniform(0.0, 2.0 * np.pi)
        directions.append((np.cos(angle), np.sin(angle)))
        signs.append(1.0 if rng.uniform() < 0.5 else -1.0)
    return ellipses, directions, signs


def phase_map(spec: PhantomSpec, xx: np.ndarray, yy: np.ndarray) -> NDArray[np.float64]:
    p = spec.phase_profile
    return p.linear_x * xx + p.linear_y * yy + p.quadratic * (xx * xx + yy * yy)


def make_phantom_sequence(spec: PhantomSpec, rng: np.random.Generator) -> ImageSequence:
    """N frames of a random ellipse phantom drifting by the configured per-frame rates."""
    if spec.N < 2 or spec.n < 2:
        raise ConfigError(f"phantom needs n >= 2 and N >= 2, got n={spec.n}, N={spec.N}")
    axis = (np.arange(spec.n) + 0.5) * (2.0 / spec.n) - 1.0
    yy, xx = np.meshgrid(axis, axis, indexing="ij")
    body = Ellipse(0.0, 0.0, BODY_AXES[0], BODY_AXES[1], 0.0, BODY_INTENSITY).mask(xx, yy)
    ellipses, directions, signs = random_ellipses(spec, rng)
    base_phase = phase_map(spec, xx, yy)
    motion = spec.motion

    frames = []
    for n in range(spec.N):
        magnitude = BODY_INTENSITY * body.astype(np.float64)
        for e, (dx, dy), sign in zip(ellipses, directions, signs):
            moved = Ellipse(
                x0=e.x0 + 2.0 * motion.translation * n * dx,
                y0=e.y0 + 2.0 * motion.translation * n * dy,
                a=e.a * (1.0 + motion.scale * n),
                b=e.b * (1.0 + motion.scale * n),
                theta=e.theta + np.deg2rad(motion.rotation_deg) * n,
                intensity=e.intensity * (1.0 + sign * motion.intensity * n),
            )
            magnitude = magnitude + moved.intensity * (moved.mask(xx, yy) & body)
        frames.append(magnitude * np.exp(1j * (base_phase + motion.phase * n)))

    seq = ImageSequence.from_frames(frames)
    if seq.max_magnitude() == 0.0:
        raise ConfigError("phantom came out all zero")
    logger.debug(f"phantom sequence n={spec.n} N={spec.N} ellipses={spec.n_ellipses}")
    return seq
