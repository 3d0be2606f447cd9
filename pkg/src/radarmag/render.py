"""Radargram heatmap rendering to binary PPM (P6): range bins down the
vertical axis, frames across the horizontal axis, values clipped to
percentiles and mapped through a colormap.  No image codec dependencies.
"""

from __future__ import annotations

from warnings import warn

import numpy as np

from .radargram import Radargram

COLORMAPS = ("gray", "jet")


def _jet(v: np.ndarray) -> np.ndarray:
    """Classic piecewise-linear jet map for v in [0, 1] -> RGB in [0, 1]."""
    r = np.clip(1.5 - np.abs(4.0 * v - 3.0), 0.0, 1.0)
    g = np.clip(1.5 - np.abs(4.0 * v - 2.0), 0.0, 1.0)
    b = np.clip(1.5 - np.abs(4.0 * v - 1.0), 0.0, 1.0)
    return np.stack([r, g, b], axis=-1)


def render_heatmap(r: Radargram, colormap: str = "jet",
                   clip_percentiles: tuple[float, float] = (1.0, 99.0)) -> np.ndarray:
    """Map samples to an RGB uint8 image of shape (n_bins, n_frames, 3)."""
    if colormap not in COLORMAPS:
        raise ValueError(f"unknown colormap {colormap!r}, expected one of {COLORMAPS}")
    p_lo, p_hi = clip_percentiles
    if not 0 <= p_lo < p_hi <= 100:
        raise ValueError(f"need 0 <= p_lo < p_hi <= 100, got {clip_percentiles}")
    lo = np.percentile(r.data, p_lo)
    hi = np.percentile(r.data, p_hi)
    if hi <= lo:
        warn("degenerate (constant) radargram; rendering uniform mid-level image", stacklevel=2)
        values = np.full(r.data.shape, 0.5)
    else:
        values = np.clip((r.data - lo) / (hi - lo), 0.0, 1.0)
    if colormap == "gray":
        rgb = np.repeat(values[:, :, None], 3, axis=2)
    else:
        rgb = _jet(values)
    return (rgb * 255.0 + 0.5).astype(np.uint8)


def write_ppm(image: np.ndarray, path: str) -> None:
    """Write an RGB uint8 array as binary PPM (P6, maxval 255)."""
    if image.ndim != 3 or image.shape[2] != 3 or image.dtype != np.uint8:
        raise ValueError(f"expected (h, w, 3) uint8 image, got {image.shape} {image.dtype}")
    height, width = image.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{width} {height}\n255\n".encode("ascii"))
        fh.write(image.tobytes())


def read_ppm(path: str) -> np.ndarray:
    """Read back a P6 PPM written by write_ppm."""
    with open(path, "rb") as fh:
        magic = fh.readline().strip()
        if magic != b"P6":
            raise ValueError(f"{path}: not a binary PPM")
        dims = fh.readline().split()
        width, height = int(dims[0]), int(dims[1])
        maxval = int(fh.readline())
        if maxval != 255:
            raise ValueError(f"{path}: unsupported maxval {maxval}")
        data = np.frombuffer(fh.read(width * height * 3), dtype=np.uint8)
    return data.reshape(height, width, 3)
