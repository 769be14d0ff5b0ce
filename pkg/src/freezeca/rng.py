"""Counter-based uniforms keyed by ``(seed, trial, x, y)``.

Each value is a pure function of its key, so windows of different sizes
agree where they overlap and results do not depend on how trials are split
across workers.  The mixer is the splitmix64 finalizer.
"""
from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * _M1
    z = z ^ (z >> np.uint64(27))
    z = z * _M2
    return z ^ (z >> np.uint64(31))


def _u64(v) -> np.ndarray:
    return np.asarray(v, dtype=np.int64).astype(np.uint64)


def hash_key(seed, trial, x, y) -> np.ndarray:
    """64-bit hash of broadcastable integer key arrays."""
    with np.errstate(over="ignore"):
        h = _mix(_u64(seed) + _GAMMA)
        for part in (trial, x, y):
            h = _mix(h ^ (_u64(part) + _GAMMA))
    return h


def uniforms(seed: int, trials, width: int, height: int, origin=(0, 0)) -> np.ndarray:
    """Uniforms in ``[0, 1)`` of shape ``(len(trials), height, width)``.

    Entry ``[t, i, j]`` belongs to trial ``trials[t]`` and cell
    ``(origin[0] + j, origin[1] + i)``.
    """
    t = np.asarray(trials, dtype=np.int64).reshape(-1, 1, 1)
    xs = np.arange(width, dtype=np.int64).reshape(1, 1, -1) + origin[0]
    ys = np.arange(height, dtype=np.int64).reshape(1, -1, 1) + origin[1]
    h = hash_key(seed, t, xs, ys)
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
