"""Embedding, stego construction and blind extraction.

Embedding, per sub-image (all four are processed, carrier or not)::

    blocks -> DCT -> zig-zag -> (head | tail) -> y = [head, Phi @ tail]
    y' = embed_block(y, first p4 zig-zag DCT coefficients of the secret)
    s' = [y'_head, LASSO(y'_tail)] -> inverse zig-zag -> IDCT -> blocks

followed by inverse sub-sampling.  Secret block ``i`` goes into cover block
``i`` of the matching sub-image, both in the shared column-major block order.

Extraction re-measures the stego sub-image with the regenerated ``Phi``,
applies the inverse rule and rebuilds each secret block from its first
``p4`` zig-zag coefficients (the rest zero).  It takes no cover input.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import codec, lasso_admm, measurement, sampling, transform
from .config import StegoConfig
from .image_io import quantize, to_real

N_SLOTS = 4


@lru_cache(maxsize=8)
def _matrix(seed: int, p3: int, p2: int) -> np.ndarray:
    return measurement.generate_matrix(seed, p3, p2)


@lru_cache(maxsize=8)
def _factor(seed: int, p3: int, p2: int, rho: float) -> lasso_admm.FactorHandle:
    return lasso_admm.prefactor(_matrix(seed, p3, p2), rho)


def measurement_matrix(cfg: StegoConfig) -> np.ndarray:
    k = cfg.key
    return _matrix(k.seed, k.p3, k.p2)


def _check_slots(slots) -> list[int]:
    slots = [int(s) for s in slots]
    if len(set(slots)) != len(slots):
        raise ValueError(f"slots must be distinct, got {slots}")
    if any(not 1 <= s <= N_SLOTS for s in slots):
        raise ValueError(f"slots must be in 1..{N_SLOTS}, got {slots}")
    return slots


def _check_square(img, side, what):
    if img.shape != (side, side):
        raise ValueError(f"{what} must be {side}x{side}, got {img.shape[1]}x{img.shape[0]}")


def secret_coefficients(secret: np.ndarray, cfg: StegoConfig) -> np.ndarray:
    """First ``p4`` zig-zag DCT coefficients of every secret block, ``(n_blocks, p4)``."""
    return transform.image_to_vectors(to_real(secret), cfg.key.l)[:, : cfg.key.p4]


@dataclass
class EmbedReport:
    """Solver diagnostics per sub-image slot (1-based keys)."""

    iterations: dict[int, np.ndarray] = field(default_factory=dict)
    converged: dict[int, np.ndarray] = field(default_factory=dict)

    def all_iterations(self) -> np.ndarray:
        if not self.iterations:
            return np.zeros(0, dtype=np.intp)
        return np.concatenate([self.iterations[s] for s in sorted(self.iterations)])


def sub_image_measurements(sub: np.ndarray, secret: np.ndarray | None, cfg: StegoConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-block measurement vectors of a cover sub-image after embedding.

    Returns ``(y, tail)``: the ``(n_blocks, p1 + p3)`` measurements carrying
    ``secret`` (untouched when it is None) and the cover's own DCT tails.
    """
    k = cfg.key
    head, tail = transform.split(transform.image_to_vectors(sub, k.b), k.p1)
    y = measurement.project(head, tail, measurement_matrix(cfg))
    if secret is not None:
        t = secret_coefficients(secret, cfg)
        n = t.shape[0]
        y[:n] = codec.embed_block(y[:n], t, cfg.constants)
    return y, tail


def construct_sub_image(
    sub: np.ndarray,
    secret: np.ndarray | None,
    cfg: StegoConfig,
    backend: str | None = None,
) -> tuple[np.ndarray, lasso_admm.BatchSolveResult]:
    """Measure one cover sub-image, embed ``secret`` (if any) and rebuild it."""
    k = cfg.key
    y, tail = sub_image_measurements(sub, secret, cfg)
    handle = _factor(k.seed, k.p3, k.p2, cfg.solver.rho)
    z0 = tail if cfg.solver.warm_start else None
    result = lasso_admm.solve_lasso_batch(y[:, k.p1 :], handle, cfg.solver, z0=z0, backend=backend)
    rebuilt = np.concatenate([y[:, : k.p1], result.solution], axis=1)
    side = sub.shape[0]
    return transform.vectors_to_image(rebuilt, k.b, side, side), result


def embed_real(
    cover: np.ndarray,
    secrets: dict[int, np.ndarray],
    cfg: StegoConfig,
    passthrough_empty: bool = False,
    backend: str | None = None,
) -> tuple[np.ndarray, EmbedReport]:
    """Build the unquantised stego image.

    ``secrets`` maps slot (1..4) to an ``m x m`` image.  Returns the float
    stego image and per-slot solver diagnostics.
    """
    k = cfg.key
    _check_slots(secrets)
    _check_square(cover, k.r, "cover")
    for slot, secret in secrets.items():
        _check_square(secret, k.m, f"secret for slot {slot}")
    report = EmbedReport()
    parts = []
    for slot, sub in enumerate(sampling.subsample(to_real(cover)), start=1):
        secret = secrets.get(slot)
        if secret is None and passthrough_empty:
            parts.append(sub)
            continue
        rebuilt, result = construct_sub_image(sub, secret, cfg, backend=backend)
        report.iterations[slot] = result.iterations
        report.converged[slot] = result.converged
        parts.append(rebuilt)
    return sampling.inverse_sample(parts), report


def embed(cover, secrets, cfg, passthrough_empty=False, backend=None) -> np.ndarray:
    """8-bit stego image: :func:`embed_real` followed by rounding and clamping."""
    stego, _ = embed_real(cover, secrets, cfg, passthrough_empty, backend)
    return quantize(stego)


def extract_coefficients(stego: np.ndarray, slot: int, cfg: StegoConfig) -> np.ndarray:
    """Recovered secret coefficients for one slot, shape ``(m^2/l^2, p4)``."""
    k = cfg.key
    (slot,) = _check_slots([slot])
    stego = to_real(stego)
    _check_square(stego, k.r, "stego image")
    sub = sampling.subsample(stego)[slot - 1]
    head, tail = transform.split(transform.image_to_vectors(sub, k.b), k.p1)
    y = measurement.project(head, tail, measurement_matrix(cfg))
    return codec.extract_block(y[: cfg.n_secret_blocks], cfg.constants)


def coefficients_to_secret(t: np.ndarray, cfg: StegoConfig) -> np.ndarray:
    k = cfg.key
    vectors = np.zeros((t.shape[0], k.l * k.l))
    vectors[:, : k.p4] = t
    return transform.vectors_to_image(vectors, k.l, k.m, k.m)


def extract(stego: np.ndarray, slots, cfg: StegoConfig) -> list[np.ndarray]:
    """Blindly recover the 8-bit secrets hidden in ``slots``."""
    return [quantize(coefficients_to_secret(extract_coefficients(stego, s, cfg), cfg)) for s in _check_slots(slots)]


def capacity(cfg: StegoConfig, n_secrets: int) -> float:
    """Embedding capacity in bits per cover pixel."""
    if not 1 <= n_secrets <= N_SLOTS:
        raise ValueError(f"n_secrets must be in 1..{N_SLOTS}, got {n_secrets}")
    k = cfg.key
    return n_secrets * k.m * k.m * 8 / (k.r * k.r)
