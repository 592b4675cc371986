"""Stego quality measures: MSE/PSNR, MSSIM, NCC, entropy and NAE.

Plus the raw data behind histogram and edge-map comparisons.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import ndimage
from skimage.filters import threshold_otsu

PEAK = 255.0


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def mse(a, b) -> float:
    a, b = _pair(a, b)
    return float(np.mean((a - b) ** 2))


def psnr(a, b) -> float:
    """PSNR in dB against peak 255; ``math.inf`` for identical images."""
    err = mse(a, b)
    if err == 0:
        return float("inf")
    return float(10.0 * np.log10(PEAK**2 / err))


@dataclass(frozen=True)
class SsimParams:
    size: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    peak: float = PEAK

    @property
    def c1(self) -> float:
        return (self.k1 * self.peak) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.peak) ** 2

    @cached_property
    def weights_1d(self) -> np.ndarray:
        x = np.arange(self.size) - (self.size - 1) / 2
        w = np.exp(-(x**2) / (2 * self.sigma**2))
        return w / w.sum()

    @property
    def window(self) -> np.ndarray:
        return np.outer(self.weights_1d, self.weights_1d)


def _filter_valid(img, w1d):
    """Separable weighted mean over every fully interior window."""
    out = ndimage.correlate1d(img, w1d, axis=0, mode="constant")
    out = ndimage.correlate1d(out, w1d, axis=1, mode="constant")
    pad = (len(w1d) - 1) // 2
    return out[pad : out.shape[0] - pad, pad : out.shape[1] - pad]


def ssim_map(a, b, params: SsimParams = SsimParams()) -> np.ndarray:
    a, b = _pair(a, b)
    if min(a.shape) < params.size:
        raise ValueError(f"image {a.shape} smaller than the {params.size}x{params.size} window")
    w = params.weights_1d
    mu_a = _filter_valid(a, w)
    mu_b = _filter_valid(b, w)
    var_a = _filter_valid(a * a, w) - mu_a**2
    var_b = _filter_valid(b * b, w) - mu_b**2
    cov = _filter_valid(a * b, w) - mu_a * mu_b
    c1, c2 = params.c1, params.c2
    return ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / ((mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2))


def mssim(a, b, params: SsimParams = SsimParams()) -> float:
    """Mean SSIM over all interior windows, stride 1."""
    return float(np.mean(ssim_map(a, b, params)))


def ncc(a, b) -> float:
    """``sum(a * b) / sum(a * a)``; not symmetric in its arguments."""
    a, b = _pair(a, b)
    denom = float(np.sum(a * a))
    if denom == 0:
        raise ZeroDivisionError("NCC undefined for an all-zero reference image")
    return float(np.sum(a * b)) / denom


def histogram(img) -> np.ndarray:
    """256-bin pixel count histogram of an 8-bit image."""
    img = np.asarray(img)
    if img.dtype != np.uint8:
        raise ValueError("histogram needs an 8-bit image")
    return np.bincount(img.ravel(), minlength=256)


def entropy(img) -> float:
    """Shannon entropy in bits of the 256-bin pixel histogram."""
    counts = histogram(img)
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log2(p))) + 0.0


def nae(a, b) -> float:
    """``sum|a - b| / sum(a)`` with ``a`` the reference image."""
    a, b = _pair(a, b)
    denom = float(np.sum(a))
    if denom == 0:
        raise ZeroDivisionError("NAE undefined for an all-zero reference image")
    return float(np.sum(np.abs(a - b))) / denom


def histogram_distance(a, b) -> float:
    """L1 distance between normalised histograms, as a fraction of total mass (0..2)."""
    ha = histogram(a) / np.asarray(a).size
    hb = histogram(b) / np.asarray(b).size
    return float(np.abs(ha - hb).sum())


def edge_map(img) -> np.ndarray:
    """Binary edge map: Sobel gradient magnitude thresholded by Otsu's method."""
    img = np.asarray(img, dtype=np.float64)
    mag = np.hypot(ndimage.sobel(img, axis=0, mode="reflect"), ndimage.sobel(img, axis=1, mode="reflect"))
    if np.ptp(mag) == 0:
        return np.zeros(img.shape, dtype=np.uint8)
    return (mag > threshold_otsu(mag)).astype(np.uint8)


def quality_row(cover, stego) -> dict[str, float]:
    """All stego-vs-cover measures in one dict."""
    return {
        "mse": mse(cover, stego),
        "psnr": psnr(cover, stego),
        "mssim": mssim(cover, stego),
        "ncc": ncc(cover, stego),
        "entropy_cover": entropy(cover),
        "entropy_stego": entropy(stego),
        "nae": nae(cover, stego),
    }
