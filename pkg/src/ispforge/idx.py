"""IDX image/label file ingestion (the MNIST container format).

Big-endian layout: 4-byte magic (0x00000803 for uint8 image tensors,
0x00000801 for label vectors), one 4-byte big-endian dimension per tensor
axis, then the raw uint8 payload.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import BadIdxFileError

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


def read_idx_images(path: str | Path) -> np.ndarray:
    """Read an IDX image file into a (count, rows, cols) uint8 array."""
    data = Path(path).read_bytes()
    if len(data) < 16:
        raise BadIdxFileError(f"{path}: too short for an IDX image header")
    magic, count, rows, cols = struct.unpack(">IIII", data[:16])
    if magic != IMAGE_MAGIC:
        raise BadIdxFileError(f"{path}: bad magic 0x{magic:08x}, expected 0x{IMAGE_MAGIC:08x}")
    expected = count * rows * cols
    payload = data[16:]
    if len(payload) < expected:
        raise BadIdxFileError(
            f"{path}: payload holds {len(payload)} bytes, header promises {expected}"
        )
    return np.frombuffer(payload[:expected], dtype=np.uint8).reshape(count, rows, cols).copy()


def read_idx_labels(path: str | Path) -> np.ndarray:
    """Read an IDX label file into a (count,) uint8 array."""
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise BadIdxFileError(f"{path}: too short for an IDX label header")
    magic, count = struct.unpack(">II", data[:8])
    if magic != LABEL_MAGIC:
        raise BadIdxFileError(f"{path}: bad magic 0x{magic:08x}, expected 0x{LABEL_MAGIC:08x}")
    payload = data[8:]
    if len(payload) < count:
        raise BadIdxFileError(f"{path}: payload holds {len(payload)} bytes, header promises {count}")
    return np.frombuffer(payload[:count], dtype=np.uint8).copy()


def write_idx_images(path: str | Path, images: np.ndarray) -> None:
    """Write a (count, rows, cols) uint8 array as an IDX image file."""
    images = np.ascontiguousarray(images, dtype=np.uint8)
    if images.ndim != 3:
        raise BadIdxFileError(f"expected (count, rows, cols) array, got shape {images.shape}")
    header = struct.pack(">IIII", IMAGE_MAGIC, *images.shape)
    Path(path).write_bytes(header + images.tobytes())
