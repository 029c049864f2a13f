"""Coarse-to-fine randomized patch extrapolation.

A classical stand-in for learned peripheral synthesis: a pyramid is built
over the image, the unknown region is seeded by boundary diffusion at the
coarsest level, and each level refines an approximate nearest-neighbor
field between unknown-centered patches and fully-known source patches
(random init, then alternating scanline propagation and random-radius
refinement), finally averaging overlapping matched patches.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, InputError
from .raster import _area_reduce_axis, _bilinear_resize, validate_raster


@dataclass(frozen=True)
class PatchParams:
    patch_size: int = 7
    pyramid_levels: int = 4
    iterations_per_level: int = 5
    search_region: int = 0  # 0: search the whole known region

    def __post_init__(self):
        if self.patch_size < 3 or self.patch_size % 2 == 0:
            raise DomainError("patch_size must be odd and >= 3")
        if self.pyramid_levels < 1:
            raise DomainError("pyramid_levels must be >= 1")
        if self.iterations_per_level < 1:
            raise DomainError("iterations_per_level must be >= 1")


def _reduce2(img: np.ndarray) -> np.ndarray:
    img = _area_reduce_axis(img, img.shape[0] // 2, 0)
    return _area_reduce_axis(img, img.shape[1] // 2, 1)


def _diffuse(img: np.ndarray, unknown: np.ndarray, iters: int) -> np.ndarray:
    """Fill unknown pixels by repeated 4-neighbor averaging (edge-replicated)."""
    x = img.copy()
    x[unknown] = x[~unknown].reshape(-1, 3).mean(axis=0)
    for _ in range(iters):
        p = np.pad(x, ((1, 1), (1, 1), (0, 0)), mode="edge")
        avg = (p[:-2, 1:-1] + p[2:, 1:-1] + p[1:-1, :-2] + p[1:-1, 2:]) / 4.0
        x[unknown] = avg[unknown]
    return x


def _source_valid(known: np.ndarray, ph: int) -> np.ndarray:
    """Centers whose full patch lies inside the image and the known region."""
    h, w = known.shape
    ok = np.zeros((h, w), dtype=bool)
    if h < 2 * ph + 1 or w < 2 * ph + 1:
        return ok
    # erosion of the known mask by the patch footprint
    core = np.ones((h - 2 * ph, w - 2 * ph), dtype=bool)
    for dy in range(-ph, ph + 1):
        for dx in range(-ph, ph + 1):
            core &= known[ph + dy:h - ph + dy, ph + dx:w - ph + dx]
    ok[ph:h - ph, ph:w - ph] = core
    return ok


def patchmatch_fill(img: np.ndarray, known: np.ndarray, params: PatchParams,
                    seed: int = 0) -> np.ndarray:
    """Fill the unknown region of img; deterministic for a fixed seed."""
    img = validate_raster(img)
    known = np.asarray(known, dtype=bool)
    if known.shape != img.shape[:2]:
        raise InputError("known mask shape must match the image")
    if not known.any():
        raise InputError("known region is empty")
    if known.all():
        return img.copy()

    rng = np.random.RandomState(seed)
    ph = params.patch_size // 2

    # pyramid: stop while the coarsest level still holds a couple of patches
    levels = 1
    h, w = img.shape[:2]
    while (levels < params.pyramid_levels
           and min(h, w) // (1 << levels) >= 2 * params.patch_size):
        levels += 1

    imgs = [np.where(known[..., None], img, 0.0)]
    knowns = [known]
    for _ in range(1, levels):
        imgs.append(_reduce2(imgs[-1]))
        knowns.append(_area_reduce_axis(
            _area_reduce_axis(knowns[-1].astype(np.float64),
                              knowns[-1].shape[0] // 2, 0),
            knowns[-1].shape[1] // 2, 1) > 0.999)
    while levels > 1 and not knowns[levels - 1].any():
        levels -= 1
    imgs = imgs[:levels]
    knowns = knowns[:levels]

    filled = None
    for lv in range(levels - 1, -1, -1):
        cur_known = knowns[lv]
        unknown = ~cur_known
        lh, lw = cur_known.shape
        if filled is None:
            x = _diffuse(imgs[lv], unknown, iters=min(2 * (lh + lw), 400))
        else:
            up = _bilinear_resize(filled, lw, lh)
            x = imgs[lv].copy()
            x[unknown] = up[unknown]

        src_valid = _source_valid(cur_known, ph)
        if src_valid.any() and unknown.any():
            x = np.ascontiguousarray(x)
            targets = np.ascontiguousarray(np.argwhere(unknown), dtype=np.int32)
            tindex = np.full((lh, lw), -1, dtype=np.int32, order="C")
            tindex[targets[:, 0], targets[:, 1]] = np.arange(len(targets), dtype=np.int32)

            ys, xs = np.nonzero(src_valid)
            bbox = (int(ys.min()), int(ys.max()), int(xs.min()), int(xs.max()))
            pick = rng.randint(len(ys), size=len(targets))
            nnf = np.ascontiguousarray(np.stack([ys[pick], xs[pick]], axis=1),
                                       dtype=np.int32)
            best_d = _kernels.patch_dists(x, targets, nnf, ph)

            radius = float(max(bbox[1] - bbox[0], bbox[3] - bbox[2], 1))
            radii = []
            while radius >= 1.0:
                radii.append(radius)
                radius /= 2.0
            radii = np.asarray(radii, dtype=np.float64)

            sv = np.ascontiguousarray(src_valid, dtype=np.uint8)
            unk8 = np.ascontiguousarray(unknown, dtype=np.uint8)
            for it in range(params.iterations_per_level):
                rand01 = rng.random_sample((len(targets), len(radii), 2))
                _kernels.propagate_search(x, targets, tindex, sv, nnf, best_d,
                                          ph, rand01, radii, bbox,
                                          params.search_region, it % 2 == 1)
            sums, counts = _kernels.vote(x, targets, nnf, unk8, ph)
            fill_vals = sums[unknown] / counts[unknown][:, None]
            x[unknown] = fill_vals
        filled = x

    out = img.copy()
    out[~known] = filled[~known]
    return np.clip(out, 0.0, 1.0)
