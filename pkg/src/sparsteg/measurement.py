"""Seeded measurement matrix and linear projection of split block vectors.

The matrix must be regenerated bit-for-bit by the receiver from the seed
alone, so the sampling path is pinned down completely:

1. Raw stream: Philox4x64-10 (NumPy's ``Philox``) with ``key = seed`` and
   the counter starting at zero.  Each call yields 64-bit words.
2. Uniforms: ``u = (word >> 11) * 2**-53``.  Words are consumed in pairs
   ``(w1, w2)``; ``u1 = 1 - u(w1)`` lies in ``(0, 1]``, ``u2 = u(w2)``.
3. Box-Muller: ``rad = sqrt(-2 ln u1)``, ``z0 = rad cos(2 pi u2)``,
   ``z1 = rad sin(2 pi u2)``, evaluated with :mod:`math` (libm), not with
   NumPy's SIMD kernels whose last-ulp results vary by CPU.
4. Normals fill the ``p3 x p2`` matrix in column-major entry order
   (``z0`` then ``z1``); a trailing unpaired ``z1`` is dropped.
5. Each column is divided by its l2 norm, computed as ``sqrt(fsum(col**2))``.
"""
from __future__ import annotations

import math

import numpy as np

SEED_BITS = 64
_TWO_PI = 2.0 * math.pi
_INV_2_53 = 2.0 ** -53


def _standard_normals(seed: int, count: int) -> np.ndarray:
    if not 0 <= seed < 2**SEED_BITS:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    pairs = (count + 1) // 2
    words = np.random.Philox(key=seed).random_raw(2 * pairs)
    mantissas = (words >> np.uint64(11)).tolist()
    out = [0.0] * (2 * pairs)
    log, sqrt, cos, sin = math.log, math.sqrt, math.cos, math.sin
    for k in range(pairs):
        u1 = 1.0 - mantissas[2 * k] * _INV_2_53
        theta = _TWO_PI * (mantissas[2 * k + 1] * _INV_2_53)
        rad = sqrt(-2.0 * log(u1))
        out[2 * k] = rad * cos(theta)
        out[2 * k + 1] = rad * sin(theta)
    return np.array(out[:count], dtype=np.float64)


def generate_matrix(seed: int, p3: int, p2: int) -> np.ndarray:
    """Column-normalised Gaussian ``p3 x p2`` measurement matrix."""
    if not p3 > p2 >= 1:
        raise ValueError(f"need p3 > p2 >= 1, got p3={p3}, p2={p2}")
    phi = _standard_normals(seed, p3 * p2).reshape(p2, p3).T.copy()
    for j in range(p2):
        col = phi[:, j]
        phi[:, j] = col / math.sqrt(math.fsum((col * col).tolist()))
    phi.setflags(write=False)
    return phi


def project(head: np.ndarray, tail: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Measurements ``[head, phi @ tail]``, batched over leading axes."""
    head = np.asarray(head, dtype=np.float64)
    tail = np.asarray(tail, dtype=np.float64)
    if tail.shape[-1] != phi.shape[1]:
        raise ValueError(f"tail length {tail.shape[-1]} does not match matrix with {phi.shape[1]} columns")
    if head.shape[:-1] != tail.shape[:-1]:
        raise ValueError("head and tail batch shapes differ")
    return np.concatenate([head, tail @ phi.T], axis=-1)
