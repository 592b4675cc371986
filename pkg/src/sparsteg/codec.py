"""Coefficient-domain embedding rule and its blind inverse.

Written with the 1-based indices of the rule itself, for a measurement
vector ``y`` of length ``p1 + p3`` and secret coefficients ``t`` of length
``p4``::

    y'(p1)  = y(p1 - 2c)     + alpha * t(1)
    y'(j)   = y(j - c)       + beta  * t(j - p1 + c + 1)    j = p1-c+1 .. p1-1
    y'(k)   = y(k - p4 + c)  + gamma * t(k - p1 - p4 + c)   k = p1+p4+1 .. p1+2p4-c

Every other entry is copied.  Extraction inverts each line,
``t = (y''(dst) - y''(src)) / gain``, which is exact as long as no source
index is also a destination; :meth:`EmbedConstants.violations` enforces that.
Internally the rule is flattened once into 0-based ``(dst, src, coef, gain)``
arrays so whole stacks of blocks are processed with fancy indexing.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


class EmbedConstantsError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class EmbedConstants:
    alpha: float = 0.01
    beta: float = 0.1
    gamma: float = 1.0
    c: int = 6
    p1: int = 32
    p4: int = 32

    def violations(self, length: int | None = None) -> list[str]:
        """Every broken invariant, for measurement vectors of ``length``."""
        out = []
        for name in ("alpha", "beta", "gamma"):
            if getattr(self, name) == 0:
                out.append(f"{name} must be non-zero")
        if not 1 <= self.c < self.p4:
            out.append(f"need 1 <= c < p4, got c={self.c}, p4={self.p4}")
        if self.p1 - 2 * self.c < 1:
            out.append(f"p1 - 2c must be >= 1, got {self.p1 - 2 * self.c}")
        if length is not None:
            if self.p4 >= length:
                out.append(f"p4 must be less than p1 + p3 = {length}, got {self.p4}")
            if self.p1 + 2 * self.p4 - self.c > length:
                out.append(
                    f"p1 + 2*p4 - c = {self.p1 + 2 * self.p4 - self.c} exceeds measurement length {length}"
                )
        if not out:
            clash = self._overlaps()
            if clash:
                out.append(f"extraction reads indices the embedding overwrites: {clash}")
        return out

    def _ranges(self):
        """(written, read) inclusive 1-based index ranges of the rule."""
        p1, p4, c = self.p1, self.p4, self.c
        written = [(p1, p1), (p1 - c + 1, p1 - 1), (p1 + p4 + 1, p1 + 2 * p4 - c)]
        read = [(p1 - 2 * c, p1 - 2 * c), (p1 - 2 * c + 1, p1 - c - 1), (p1 + c + 1, p1 + p4)]
        return written, read

    def _overlaps(self) -> list[tuple[int, int]]:
        written, read = self._ranges()
        out = []
        for lo1, hi1 in written:
            for lo2, hi2 in read:
                lo, hi = max(lo1, lo2), min(hi1, hi2)
                if lo <= hi:
                    out.append((lo, hi))
        return out

    def check(self, length: int) -> None:
        bad = self.violations(length)
        if bad:
            raise EmbedConstantsError(bad)

    @cached_property
    def _index_map(self):
        p1, p4, c = self.p1, self.p4, self.c
        dst, src, coef, gain = [p1], [p1 - 2 * c], [1], [self.alpha]
        for j in range(p1 - c + 1, p1):
            dst.append(j)
            src.append(j - c)
            coef.append(j - p1 + c + 1)
            gain.append(self.beta)
        for k in range(p1 + p4 + 1, p1 + 2 * p4 - c + 1):
            dst.append(k)
            src.append(k - p4 + c)
            coef.append(k - p1 - p4 + c)
            gain.append(self.gamma)
        return (
            np.array(dst, dtype=np.intp) - 1,
            np.array(src, dtype=np.intp) - 1,
            np.array(coef, dtype=np.intp) - 1,
            np.array(gain, dtype=np.float64),
        )

    def written_indices(self) -> np.ndarray:
        """0-based measurement indices modified by the embedding."""
        return self._index_map[0]


def embed_block(y: np.ndarray, t: np.ndarray, k: EmbedConstants) -> np.ndarray:
    """Embed secret coefficients ``t`` into measurements ``y``.

    Both arguments may be stacks: ``y`` of shape ``(..., p1 + p3)`` and
    ``t`` of shape ``(..., p4)``.  Returns a new array.
    """
    y = np.asarray(y, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    k.check(y.shape[-1])
    if t.shape[-1] != k.p4:
        raise ValueError(f"expected {k.p4} secret coefficients, got {t.shape[-1]}")
    dst, src, coef, gain = k._index_map
    out = y.copy()
    out[..., dst] = y[..., src] + gain * t[..., coef]
    return out


def extract_block(y: np.ndarray, k: EmbedConstants) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    k.check(y.shape[-1])
    dst, src, coef, gain = k._index_map
    t = np.zeros(y.shape[:-1] + (k.p4,))
    t[..., coef] = (y[..., dst] - y[..., src]) / gain
    return t
