"""Grayscale image I/O.

Images are plain NumPy arrays: ``uint8`` of shape ``(height, width)`` for
8-bit pixels and ``float64`` of the same shape for the real-valued staging
representation used between transform and solver steps.

Supported on disk:

* PGM, binary (P5) and ASCII (P2), maxval <= 255.  Writing always emits P5.
* 8-bit grayscale PNG (through Pillow), import/export convenience only.
* A float raster: magic ``b"SABF"``, u32 width, u32 height, then
  ``width * height`` little-endian f64 values, row-major.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from PIL import Image

FLOAT_MAGIC = b"SABF"


class ImageFormatError(ValueError):
    """Base class for image decoding failures."""


class MalformedHeaderError(ImageFormatError):
    pass


class UnsupportedMaxvalError(ImageFormatError):
    pass


class TruncatedPayloadError(ImageFormatError):
    pass


def _check_gray(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D image, got shape {img.shape}")
    if img.dtype != np.uint8:
        if not np.issubdtype(img.dtype, np.integer) or img.min() < 0 or img.max() > 255:
            raise ValueError("pixel values must be integers in [0, 255]")
        img = img.astype(np.uint8)
    return img


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping comments.

    Returns the tokens and the offset of the byte following the last token.
    """
    tokens: list[bytes] = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= n:
            raise MalformedHeaderError("malformed header: unexpected end of file")
        if data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def decode_pgm(data: bytes) -> np.ndarray:
    if len(data) < 2 or data[:2] not in (b"P5", b"P2"):
        raise MalformedHeaderError("malformed header: not a P5/P2 PGM")
    magic = data[:2]
    tokens, pos = _header_tokens(data[2:], 3)
    pos += 2
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise MalformedHeaderError(f"malformed header: non-integer field in {tokens!r}") from None
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"malformed header: bad dimensions {width}x{height}")
    if maxval < 1 or maxval > 255:
        raise UnsupportedMaxvalError(f"unsupported maxval {maxval} (only 1..255)")

    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        if pos >= len(data) or not data[pos : pos + 1].isspace():
            raise MalformedHeaderError("malformed header: missing separator before raster")
        payload = data[pos + 1 : pos + 1 + count]
        if len(payload) < count:
            raise TruncatedPayloadError(f"truncated payload: expected {count} bytes, got {len(payload)}")
        pixels = np.frombuffer(payload, dtype=np.uint8).copy()
    else:
        fields = data[pos:].split()
        if len(fields) < count:
            raise TruncatedPayloadError(f"truncated payload: expected {count} values, got {len(fields)}")
        try:
            pixels = np.array([int(f) for f in fields[:count]], dtype=np.int64)
        except ValueError:
            raise ImageFormatError("non-integer sample in ASCII raster") from None
    if pixels.max(initial=0) > maxval:
        raise ImageFormatError("sample exceeds maxval")
    return pixels.astype(np.uint8).reshape(height, width)


def load_pgm(path) -> np.ndarray:
    """Load a P5 or P2 PGM exactly as stored (no maxval rescaling)."""
    return decode_pgm(Path(path).read_bytes())


def encode_pgm(img: np.ndarray) -> bytes:
    img = _check_gray(img)
    height, width = img.shape
    return b"P5\n%d %d\n255\n" % (width, height) + np.ascontiguousarray(img).tobytes()


def save_pgm(img: np.ndarray, path) -> None:
    Path(path).write_bytes(encode_pgm(img))


def load_float_raster(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != FLOAT_MAGIC:
        raise MalformedHeaderError("malformed header: not a float raster")
    width, height = struct.unpack("<II", data[4:12])
    count = width * height
    payload = data[12 : 12 + 8 * count]
    if len(payload) < 8 * count:
        raise TruncatedPayloadError(f"truncated payload: expected {8 * count} bytes, got {len(payload)}")
    return np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(height, width)


def save_float_raster(img: np.ndarray, path) -> None:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("expected a 2-D image")
    height, width = img.shape
    header = FLOAT_MAGIC + struct.pack("<II", width, height)
    Path(path).write_bytes(header + img.astype("<f8").tobytes())


def load_image(path) -> np.ndarray:
    """Load any supported grayscale image by extension.

    ``.pgm`` goes through the bit-exact decoder, ``.sabf`` returns the float
    raster, anything else is opened with Pillow and must already be 8-bit
    grayscale (mode ``L``); color images are rejected.
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in (".pgm", ".pnm"):
        return load_pgm(path)
    if suffix == ".sabf":
        return load_float_raster(path)
    with Image.open(path) as im:
        if im.mode != "L":
            raise ImageFormatError(f"{path}: expected 8-bit grayscale, got mode {im.mode}")
        return np.asarray(im, dtype=np.uint8).copy()


def save_image(img: np.ndarray, path) -> None:
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in (".pgm", ".pnm"):
        save_pgm(img, path)
    elif suffix == ".sabf":
        save_float_raster(img, path)
    else:
        Image.fromarray(_check_gray(img)).save(path)


def to_real(img: np.ndarray) -> np.ndarray:
    return np.asarray(img, dtype=np.float64)


def quantize(img: np.ndarray) -> np.ndarray:
    """Round half away from zero, then clamp to [0, 255]."""
    img = np.asarray(img, dtype=np.float64)
    rounded = np.sign(img) * np.floor(np.abs(img) + 0.5)
    return np.clip(rounded, 0, 255).astype(np.uint8)


def to_gray(img: np.ndarray) -> np.ndarray:
    """Collapse an RGB(A) array to 8-bit luma; pass grayscale through."""
    img = np.asarray(img)
    if img.ndim == 3:
        if img.dtype != np.uint8:
            img = np.clip(np.round(img * 255 if img.max() <= 1 else img), 0, 255).astype(np.uint8)
        return np.asarray(Image.fromarray(np.ascontiguousarray(img[..., :3])).convert("L"))
    if img.dtype == np.bool_:
        return img.astype(np.uint8) * 255
    if img.dtype != np.uint8:
        if img.max() <= 1.0:
            img = img * 255.0
        return quantize(img)
    return img


def resize_square(img: np.ndarray, side: int) -> np.ndarray:
    """Resize to ``side x side``: box (area) filter when shrinking, bilinear when growing.

    Each axis shrinks or grows independently, so mixed cases take the filter
    of the larger change in pixel count.
    """
    img = _check_gray(img)
    if img.shape == (side, side):
        return img.copy()
    resample = Image.BOX if side * side < img.size else Image.BILINEAR
    return np.asarray(Image.fromarray(img).resize((side, side), resample=resample))
