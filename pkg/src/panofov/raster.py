"""Raster image utilities.

Images are float64 numpy arrays of shape (H, W, 3) with samples in [0, 1].
PNG 8-bit RGB is the interchange format; values map linearly to [0, 1].
"""
from __future__ import annotations

import numpy as np
from PIL import Image

from .errors import DimensionError, InputError


def validate_raster(img: np.ndarray) -> np.ndarray:
    """Check shape/range and return the array as float64."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise InputError(f"expected (H, W, 3) raster, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise InputError("raster must be at least 1x1")
    if not np.all(np.isfinite(img)):
        raise InputError("raster contains non-finite samples")
    lo, hi = img.min(), img.max()
    if lo < -1e-9 or hi > 1.0 + 1e-9:
        raise InputError("raster samples must lie in [0, 1]")
    if lo < 0.0 or hi > 1.0:
        img = np.clip(img, 0.0, 1.0)  # interpolation round-off only
    return img


def load_png(path) -> np.ndarray:
    """Load an 8-bit RGB image file as a [0,1] float raster."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float64)
    return arr / 255.0


def save_png(path, img: np.ndarray) -> None:
    """Save a [0,1] float raster as 8-bit RGB PNG (round-to-nearest)."""
    arr = np.clip(np.asarray(img), 0.0, 1.0)
    Image.fromarray((arr * 255.0 + 0.5).astype(np.uint8), mode="RGB").save(path)


def _area_reduce_axis(x: np.ndarray, m: int, axis: int) -> np.ndarray:
    """Exact box-average reduction of one axis from n to m samples (m <= n).

    Output sample j averages the input over the fractional span
    [j*n/m, (j+1)*n/m), so integer-factor reductions are plain means.
    """
    x = np.moveaxis(x, axis, 0)
    n = x.shape[0]
    if m == n:
        return np.moveaxis(x, 0, axis)
    scale = n / m
    # integral of the piecewise-constant signal: I[k] = sum of first k samples
    integ = np.concatenate([np.zeros((1,) + x.shape[1:]), np.cumsum(x, axis=0)], axis=0)

    def sample(pos):
        # value of the running integral at fractional position pos
        k = np.minimum(np.floor(pos).astype(int), n - 1)
        frac = pos - k
        return integ[k] + frac[(...,) + (None,) * (x.ndim - 1)] * x[k]

    a = np.arange(m) * scale
    b = a + scale
    b[-1] = n  # guard rounding at the top edge
    out = (sample(b) - sample(a)) / scale
    return np.moveaxis(out, 0, axis)


def _bilinear_axis_coords(n_in: int, n_out: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    pos = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    pos = np.clip(pos, 0.0, n_in - 1.0)
    i0 = np.floor(pos).astype(int)
    i1 = np.minimum(i0 + 1, n_in - 1)
    return i0, i1, pos - i0


def _bilinear_resize(img: np.ndarray, w: int, h: int) -> np.ndarray:
    y0, y1, fy = _bilinear_axis_coords(img.shape[0], h)
    x0, x1, fx = _bilinear_axis_coords(img.shape[1], w)
    fy = fy[:, None, None]
    fx = fx[None, :, None]
    top = img[y0][:, x0] * (1 - fx) + img[y0][:, x1] * fx
    bot = img[y1][:, x0] * (1 - fx) + img[y1][:, x1] * fx
    return top * (1 - fy) + bot * fy


def resize(img: np.ndarray, w: int, h: int) -> np.ndarray:
    """Resize to (h, w): area averaging on shrink, bilinear on grow.

    Mixed aspect changes shrink first, then grow, one axis at a time.
    """
    img = np.asarray(img, dtype=np.float64)
    if w < 1 or h < 1:
        raise DimensionError("target size must be positive")
    if img.shape[0] > h:
        img = _area_reduce_axis(img, h, 0)
    if img.shape[1] > w:
        img = _area_reduce_axis(img, w, 1)
    if img.shape[0] != h or img.shape[1] != w:
        img = _bilinear_resize(img, w, h)
    # interpolation of in-range samples is in range up to float drift
    return np.clip(img, 0.0, 1.0)


def crop_central_quarter(img: np.ndarray) -> np.ndarray:
    """Centered H/2 x W/2 crop (a quarter of the area).

    Odd dimensions are rejected; the 2x2 degenerate case resolves toward
    the top-left of the two central candidates by the floor-division origin.
    """
    img = np.asarray(img)
    h, w = img.shape[:2]
    if h % 2 or w % 2:
        raise DimensionError(f"central-quarter crop needs even dimensions, got {w}x{h}")
    ch, cw = h // 2, w // 2
    y0 = (h - ch) // 2
    x0 = (w - cw) // 2
    return img[y0:y0 + ch, x0:x0 + cw].copy()


def bilinear_sample(img: np.ndarray, x: np.ndarray, y: np.ndarray,
                    wrap_x: bool = False) -> np.ndarray:
    """Sample (H, W, C) at continuous pixel coordinates (x, y).

    Pixel centers sit at integer coordinates. x wraps cyclically when
    wrap_x is set (360-degree panoramas); otherwise both axes clamp.
    """
    h, w = img.shape[:2]
    if wrap_x:
        x = np.mod(x, w)
        x0 = np.floor(x).astype(int)
        fx = x - x0
        x0 = np.mod(x0, w)
        x1 = np.mod(x0 + 1, w)
    else:
        x = np.clip(x, 0.0, w - 1.0)
        x0 = np.floor(x).astype(int)
        fx = x - x0
        x1 = np.minimum(x0 + 1, w - 1)
    y = np.clip(y, 0.0, h - 1.0)
    y0 = np.floor(y).astype(int)
    fy = y - y0
    y1 = np.minimum(y0 + 1, h - 1)

    fx = fx[..., None]
    fy = fy[..., None]
    top = img[y0, x0] * (1 - fx) + img[y0, x1] * fx
    bot = img[y1, x0] * (1 - fx) + img[y1, x1] * fx
    return top * (1 - fy) + bot * fy
