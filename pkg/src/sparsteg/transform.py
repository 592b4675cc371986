"""Block DCT sparsification and zig-zag serialisation.

All functions are batched: a stack of blocks is an array of shape
``(n_blocks, side, side)`` and a stack of zig-zag vectors is
``(n_blocks, side * side)``.

Blocks are enumerated column-major over the block grid: block ``(bi, bj)``
(block row, block column) has index ``bj * n_block_rows + bi``.  Embedding
and extraction both rely on this single ordering.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix ``C`` so that ``dct(x) = C @ x``."""
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    c = np.sqrt(2.0 / n) * np.cos(np.pi * (2 * i + 1) * k / (2 * n))
    c[0, :] = np.sqrt(1.0 / n)
    c.setflags(write=False)
    return c


def dct2(blocks: np.ndarray) -> np.ndarray:
    """Orthonormal 2-D type-II DCT of one block or a stack of blocks."""
    blocks = np.asarray(blocks, dtype=np.float64)
    c = dct_matrix(blocks.shape[-1])
    return c @ blocks @ c.T


def idct2(coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.float64)
    c = dct_matrix(coeffs.shape[-1])
    return c.T @ coeffs @ c


@lru_cache(maxsize=None)
def zigzag_order(n: int) -> np.ndarray:
    """Flat (row-major) indices of an ``n x n`` block in JPEG zig-zag order.

    Anti-diagonals ``i + j = s`` are walked upward (row decreasing) when
    ``s`` is even and downward when odd, starting with a step right from
    ``(0, 0)``.
    """
    cells = sorted(
        ((i, j) for i in range(n) for j in range(n)),
        key=lambda ij: (ij[0] + ij[1], ij[0] if (ij[0] + ij[1]) % 2 else ij[1]),
    )
    order = np.array([i * n + j for i, j in cells], dtype=np.intp)
    order.setflags(write=False)
    return order


def zigzag(blocks: np.ndarray) -> np.ndarray:
    blocks = np.asarray(blocks)
    n = blocks.shape[-1]
    if blocks.shape[-2] != n:
        raise ValueError("zig-zag needs square blocks")
    flat = blocks.reshape(blocks.shape[:-2] + (n * n,))
    return flat[..., zigzag_order(n)]


def inverse_zigzag(vectors: np.ndarray) -> np.ndarray:
    vectors = np.asarray(vectors)
    length = vectors.shape[-1]
    n = int(round(length ** 0.5))
    if n * n != length:
        raise ValueError(f"vector length {length} is not a perfect square")
    flat = np.empty_like(vectors)
    flat[..., zigzag_order(n)] = vectors
    return flat.reshape(vectors.shape[:-1] + (n, n))


def partition_blocks(img: np.ndarray, side: int) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError("expected a 2-D image")
    h, w = img.shape
    if side < 1 or h % side or w % side:
        raise ValueError(f"block side {side} does not divide image shape {img.shape}")
    grid = img.reshape(h // side, side, w // side, side)
    # axes -> (block col, block row, r, c) gives column-major block order
    return np.ascontiguousarray(grid.transpose(2, 0, 1, 3)).reshape(-1, side, side)


def assemble_blocks(blocks: np.ndarray, width: int, height: int) -> np.ndarray:
    blocks = np.asarray(blocks)
    if blocks.ndim != 3 or blocks.shape[1] != blocks.shape[2]:
        raise ValueError("expected a stack of square blocks")
    side = blocks.shape[1]
    if height % side or width % side or blocks.shape[0] * side * side != width * height:
        raise ValueError(
            f"{blocks.shape[0]} blocks of side {side} cannot tile a {width}x{height} image"
        )
    grid = blocks.reshape(width // side, height // side, side, side)
    return np.ascontiguousarray(grid.transpose(1, 2, 0, 3)).reshape(height, width)


def split(vectors: np.ndarray, p1: int) -> tuple[np.ndarray, np.ndarray]:
    """Split zig-zag vectors into the low-frequency head and the tail."""
    vectors = np.asarray(vectors)
    length = vectors.shape[-1]
    if not 0 <= p1 <= length - p1:
        raise ValueError(f"need 0 <= p1 <= p2 with p1 + p2 = {length}, got p1={p1}")
    return vectors[..., :p1], vectors[..., p1:]


def image_to_vectors(img: np.ndarray, side: int) -> np.ndarray:
    """Blocks -> DCT -> zig-zag, one row per block."""
    return zigzag(dct2(partition_blocks(img, side)))


def vectors_to_image(vectors: np.ndarray, side: int, width: int, height: int) -> np.ndarray:
    return assemble_blocks(idct2(inverse_zigzag(vectors)), width, height)
