"""Procedural 28x28 digit-like glyphs.

Self-contained stand-in for handwritten-digit image files: each of the ten
digits is a polyline template in unit coordinates, rasterized with a round
brush after a random similarity jitter. Useful wherever a glyph source is
needed without shipping external data; real IDX files plug into the same
pipeline through :mod:`ispforge.idx`.
"""

from __future__ import annotations

import numpy as np

GLYPH_SIZE = 28

# polyline strokes per digit, coordinates in [0, 1] x [0, 1] (x right, y down)
_TEMPLATES: dict[int, list[list[tuple[float, float]]]] = {
    0: [[(0.5, 0.1), (0.8, 0.3), (0.8, 0.7), (0.5, 0.9), (0.2, 0.7), (0.2, 0.3), (0.5, 0.1)]],
    1: [[(0.35, 0.25), (0.55, 0.1), (0.55, 0.9)]],
    2: [[(0.2, 0.3), (0.4, 0.1), (0.7, 0.15), (0.75, 0.4), (0.25, 0.9), (0.8, 0.9)]],
    3: [[(0.25, 0.15), (0.7, 0.2), (0.45, 0.45), (0.75, 0.65), (0.6, 0.9), (0.2, 0.85)]],
    4: [[(0.65, 0.9), (0.65, 0.1), (0.2, 0.65), (0.8, 0.65)]],
    5: [[(0.75, 0.1), (0.3, 0.1), (0.25, 0.5), (0.65, 0.45), (0.75, 0.7), (0.55, 0.9), (0.2, 0.85)]],
    6: [[(0.7, 0.1), (0.35, 0.35), (0.25, 0.7), (0.5, 0.9), (0.75, 0.7), (0.55, 0.5), (0.3, 0.6)]],
    7: [[(0.2, 0.1), (0.8, 0.1), (0.45, 0.9)]],
    8: [[(0.5, 0.1), (0.75, 0.25), (0.5, 0.48), (0.25, 0.25), (0.5, 0.1)],
        [(0.5, 0.48), (0.8, 0.7), (0.5, 0.92), (0.2, 0.7), (0.5, 0.48)]],
    9: [[(0.7, 0.4), (0.45, 0.5), (0.3, 0.3), (0.5, 0.1), (0.7, 0.25), (0.7, 0.4), (0.6, 0.9)]],
}


def render_glyph(digit: int, rng: np.random.Generator, size: int = GLYPH_SIZE) -> np.ndarray:
    """Rasterize one digit template with random shift/scale/rotation.

    Returns a (size, size) uint8 image with intensities in [0, 255].
    """
    strokes = _TEMPLATES[digit % 10]
    scale = rng.uniform(0.75, 1.0)
    angle = rng.uniform(-0.25, 0.25)
    shift = rng.uniform(-0.07, 0.07, size=2)
    cos_a, sin_a = np.cos(angle), np.sin(angle)
    brush = rng.uniform(0.05, 0.075)  # radius in unit coordinates

    img = np.zeros((size, size), dtype=np.float64)
    ys, xs = np.mgrid[0:size, 0:size]
    px = (xs + 0.5) / size
    py = (ys + 0.5) / size
    for stroke in strokes:
        pts = np.asarray(stroke, dtype=np.float64) - 0.5
        pts = pts @ np.array([[cos_a, -sin_a], [sin_a, cos_a]]).T * scale + 0.5 + shift
        for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
            seg_len = float(np.hypot(x1 - x0, y1 - y0))
            n_steps = max(2, int(seg_len * size * 3))
            ts = np.linspace(0.0, 1.0, n_steps)
            cx = x0 + (x1 - x0) * ts
            cy = y0 + (y1 - y0) * ts
            d2 = (px[..., None] - cx) ** 2 + (py[..., None] - cy) ** 2
            img = np.maximum(img, np.max(d2 < brush**2, axis=-1))
    return (img * 255).astype(np.uint8)


def glyph_bank(count: int, seed: int, size: int = GLYPH_SIZE) -> np.ndarray:
    """(count, size, size) uint8 stack cycling through the ten digits."""
    rng = np.random.default_rng(seed)
    return np.stack([render_glyph(i % 10, rng, size) for i in range(count)])
