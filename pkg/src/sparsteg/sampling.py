"""Parity sub-sampling of a square image into four quarter-size images.

With 1-based pixel coordinates ``CI(row, col)`` the four parts are::

    CI1(n1, n2) = CI(2n1 - 1, 2n2 - 1)
    CI2(n1, n2) = CI(2n1,     2n2 - 1)
    CI3(n1, n2) = CI(2n1 - 1, 2n2)
    CI4(n1, n2) = CI(2n1,     2n2)

In 0-based NumPy slicing that is ``[0::2, 0::2]``, ``[1::2, 0::2]``,
``[0::2, 1::2]`` and ``[1::2, 1::2]``: part 2 takes the odd *rows*, part 3
the odd *columns*.  This is the only place the 1-based form is translated.
"""
from __future__ import annotations

import numpy as np

# (row offset, column offset) of parts 1..4
PARITY = ((0, 0), (1, 0), (0, 1), (1, 1))


def subsample(img: np.ndarray) -> list[np.ndarray]:
    img = np.asarray(img)
    if img.ndim != 2 or img.shape[0] != img.shape[1] or img.shape[0] % 2:
        raise ValueError(f"sub-sampling needs a square image with even side, got {img.shape}")
    return [np.ascontiguousarray(img[dr::2, dc::2]) for dr, dc in PARITY]


def inverse_sample(parts) -> np.ndarray:
    parts = [np.asarray(p) for p in parts]
    if len(parts) != 4:
        raise ValueError(f"need exactly four sub-images, got {len(parts)}")
    shape = parts[0].shape
    if len(shape) != 2 or shape[0] != shape[1] or any(p.shape != shape for p in parts):
        raise ValueError("sub-images must be square and share one shape")
    out = np.empty((2 * shape[0], 2 * shape[1]), dtype=np.result_type(*parts))
    for (dr, dc), part in zip(PARITY, parts):
        out[dr::2, dc::2] = part
    return out
