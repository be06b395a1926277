"""8-bit grayscale PGM (P5) emission for contrast maps and BP magnitudes."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ContainerFormatError

DEFAULT_MAX_CHI = 4.0


def quantize(values: np.ndarray, max_value: float = DEFAULT_MAX_CHI) -> np.ndarray:
    """Map [0, max_value] to uint8 0..255, clamping values outside the range."""
    scaled = np.clip(np.asarray(values, dtype=np.float64), 0.0, max_value) / max_value
    return np.rint(scaled * 255.0).astype(np.uint8)


def write_pgm(path: str | Path, values: np.ndarray, max_value: float = DEFAULT_MAX_CHI) -> None:
    img = quantize(values, max_value)
    if img.ndim != 2:
        raise ContainerFormatError(f"PGM wants a 2D image, got shape {img.shape}")
    height, width = img.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + img.tobytes())


def read_pgm(path: str | Path) -> np.ndarray:
    """Read a binary 8-bit PGM written by :func:`write_pgm`."""
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if len(parts) != 4 or parts[0] != b"P5":
        raise ContainerFormatError(f"{path}: not a binary PGM file")
    width, height = (int(tok) for tok in parts[1].split())
    if parts[2] != b"255":
        raise ContainerFormatError(f"{path}: only maxval 255 is supported")
    payload = parts[3]
    if len(payload) < width * height:
        raise ContainerFormatError(f"{path}: truncated pixel payload")
    return np.frombuffer(payload[: width * height], dtype=np.uint8).reshape(height, width).copy()
