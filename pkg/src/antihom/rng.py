"""Counter-based random streams keyed by ``(seed, index)``.

Each scan point gets its own Philox stream: the key holds the seed and the
point index selects a disjoint block of the 256-bit counter, so a draw does
not depend on which other points were evaluated or in what order.
"""

import numpy as np

ALGORITHM = "numpy.random.Philox(4x64-10); key=(seed, 0); counter=(0, 0, index, 0)"

_MASK = (1 << 64) - 1


def point_generator(seed: int, index: int) -> np.random.Generator:
    if index < 0:
        raise ValueError("index must be non-negative")
    key = np.array([int(seed) & _MASK, 0], dtype=np.uint64)
    counter = np.array([0, 0, int(index) & _MASK, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))
