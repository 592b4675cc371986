"""Stand-in evaluation images from scikit-image's bundled data.

Ten grayscale covers and four secrets, written as PGM plus manifests for
the experiment harness.  Covers are prepared at half the target side and
enlarged 2x (bilinear), the way 512-pixel originals become 1024-pixel
covers; secrets are resized straight to their target side.

Covers are ordinary photographs with under 1% of pixels at 0 or 255.
Heavily clipped covers (``astronaut`` has 11% saturated pixels) lose payload
when the stego image is clamped to 8 bits, which says more about the image
than the scheme, so such images serve only as secrets.
"""
from __future__ import annotations

import json
from itertools import combinations
from pathlib import Path

import numpy as np
from skimage import data

from .image_io import resize_square, save_pgm, to_gray

COVERS = (
    "camera", "brick", "chelsea", "coffee", "coins",
    "moon", "rocket", "clock", "motorcycle", "immunohistochemistry",
)
SECRETS = ("astronaut", "coffee", "chelsea", "camera")
MAX_SATURATED = 0.01


def source(name: str) -> np.ndarray:
    """Native-resolution 8-bit grayscale version of a bundled image."""
    if name == "motorcycle":
        return to_gray(data.stereo_motorcycle()[0])
    return to_gray(getattr(data, name)())


def cover_image(name: str, side: int) -> np.ndarray:
    """Cover at ``side``: centre-cropped square, shrunk to ``side/2``, enlarged 2x."""
    return resize_square(resize_square(_square(source(name)), side // 2), side)


def secret_image(name: str, side: int) -> np.ndarray:
    return resize_square(_square(source(name)), side)


def _square(img):
    h, w = img.shape
    s = min(h, w)
    top, left = (h - s) // 2, (w - s) // 2
    return img[top : top + s, left : left + s]


def write_suite(out_dir, r: int = 1024, m: int = 512, all_subsets: bool = False) -> Path:
    """Write covers, secrets and ``manifest.json``; return the manifest path.

    By default every cover carries all four secrets (slot ``i`` holds secret
    ``i``).  With ``all_subsets`` every non-empty subset of the secrets is run
    on every cover, keeping each secret in its own slot.
    """
    out = Path(out_dir)
    (out / "covers").mkdir(parents=True, exist_ok=True)
    (out / "secrets").mkdir(parents=True, exist_ok=True)
    for name in COVERS:
        save_pgm(cover_image(name, r), out / "covers" / f"{name}.pgm")
    for name in SECRETS:
        save_pgm(secret_image(name, m), out / "secrets" / f"{name}.pgm")
    if all_subsets:
        subsets = [c for n in range(1, len(SECRETS) + 1) for c in combinations(range(len(SECRETS)), n)]
    else:
        subsets = [tuple(range(len(SECRETS)))]
    runs = [
        {
            "cover": f"covers/{cover}.pgm",
            "secrets": [f"secrets/{SECRETS[i]}.pgm" for i in subset],
            "slots": [i + 1 for i in subset],
        }
        for cover in COVERS
        for subset in subsets
    ]
    manifest = out / "manifest.json"
    manifest.write_text(json.dumps(runs, indent=1) + "\n", encoding="utf-8")
    return manifest
