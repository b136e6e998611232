"""Counter-based random streams keyed by ``(master seed, sample index)``.

Each sample draws from its own Philox stream whose 128-bit key packs the
master seed and the sample index, so results never depend on how samples are
scheduled across workers.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream", "MASK64"]

MASK64 = (1 << 64) - 1


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Independent generator for sample ``index`` under master ``seed``."""
    key = ((int(seed) & MASK64) << 64) | (int(index) & MASK64)
    return np.random.Generator(np.random.Philox(key=key))
