"""Counter-based random streams.

Every randomized operation in the library takes an explicit 64-bit seed.
Philox is counter-based, so (seed, index) pairs give statistically
independent substreams and parallel work can be split across substreams
without any coordination. Results depend only on the (seed, index)
assignment, never on scheduling.
"""

from __future__ import annotations

import numpy as np

__all__ = ["substream"]


def substream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for substream `index` of the stream keyed by `seed`."""
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    index = int(index) & 0xFFFFFFFFFFFFFFFF
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
