"""Perspective <-> equirectangular mapping and dataset-pair construction.

Conventions: longitude is measured in degrees from the panorama's central
meridian, positive to the right; latitude positive up. A view direction at
(yaw, pitch) = (0, 0) looks along +Z; +X is right, +Y is up; roll is fixed
to 0. Pixel i spans [i, i+1) with its center at i + 0.5, so continuous
pixel coordinates put integer values at sample centers after the -0.5 shift.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CoverageError, DomainError
from .raster import bilinear_sample, crop_central_quarter, resize, validate_raster

DIRECTIONS = {"front": 0.0, "right": 90.0, "back": 180.0, "left": -90.0}


@dataclass(frozen=True)
class ViewSpec:
    """Orientation and FoV of a perspective (gnomonic) view."""

    yaw: float
    pitch: float
    fov_h: float
    fov_v: float

    def __post_init__(self):
        if not (-180 <= self.yaw < 180):
            raise DomainError(f"yaw must lie in [-180, 180), got {self.yaw}")
        if not (-90 <= self.pitch <= 90):
            raise DomainError(f"pitch must lie in [-90, 90], got {self.pitch}")
        if not (0 < self.fov_h < 180 and 0 < self.fov_v < 180):
            raise DomainError("FoV must lie strictly inside (0, 180)")


@dataclass(frozen=True)
class EquirectPanorama:
    """Equirectangular raster with declared angular coverage.

    lat_span is fixed at 180; lon_span is 180 (front hemisphere) or 360
    (full sphere). Square angular pixels: width/lon_span == height/lat_span.
    """

    image: np.ndarray
    lon_span: float

    LAT_SPAN = 180.0

    def __post_init__(self):
        validate_raster(self.image)
        if self.lon_span not in (180.0, 360.0):
            raise DomainError(f"lon_span must be 180 or 360, got {self.lon_span}")
        h, w = self.image.shape[:2]
        if abs(w / self.lon_span - h / self.LAT_SPAN) > 1e-9:
            raise DomainError(
                f"non-square angular pixels: {w}x{h} for lon_span {self.lon_span}")

    @property
    def width(self) -> int:
        return self.image.shape[1]

    @property
    def height(self) -> int:
        return self.image.shape[0]

    @property
    def full_sphere(self) -> bool:
        return self.lon_span == 360.0


@dataclass(frozen=True)
class PairTriple:
    """One training example: narrow input and the two stage targets."""

    input_narrow: np.ndarray
    target_near: np.ndarray
    target_mid: np.ndarray
    direction: str

    def __post_init__(self):
        for name in ("input_narrow", "target_near", "target_mid"):
            img = getattr(self, name)
            if img.shape[:2] != (256, 256):
                raise DomainError(f"{name} must be 256x256, got {img.shape[:2]}")
        if self.direction not in DIRECTIONS:
            raise DomainError(f"unknown direction {self.direction!r}")


def lonlat_to_pixel(pano: EquirectPanorama, lon, lat):
    """Continuous pixel coordinates (x, y) of angular position (lon, lat)."""
    lon = np.asarray(lon, dtype=np.float64)
    lat = np.asarray(lat, dtype=np.float64)
    half = pano.lon_span / 2
    if np.any(lon < -half) or np.any(lon > half) or np.any(np.abs(lat) > 90):
        raise CoverageError("lon/lat outside panorama coverage")
    x = (lon / pano.lon_span + 0.5) * pano.width - 0.5
    y = (0.5 - lat / pano.LAT_SPAN) * pano.height - 0.5
    return x, y


def pixel_to_lonlat(pano: EquirectPanorama, x, y):
    """Inverse of lonlat_to_pixel."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    lon = ((x + 0.5) / pano.width - 0.5) * pano.lon_span
    lat = (0.5 - (y + 0.5) / pano.height) * pano.LAT_SPAN
    return lon, lat


def _camera_basis(view: ViewSpec):
    yaw = np.radians(view.yaw)
    pitch = np.radians(view.pitch)
    forward = np.array([np.cos(pitch) * np.sin(yaw),
                        np.sin(pitch),
                        np.cos(pitch) * np.cos(yaw)])
    right = np.array([np.cos(yaw), 0.0, -np.sin(yaw)])
    up = np.cross(forward, right)
    return forward, right, up


def _dirs_to_lonlat(d: np.ndarray):
    # d: (..., 3) unit-or-not direction vectors
    lon = np.degrees(np.arctan2(d[..., 0], d[..., 2]))
    lat = np.degrees(np.arcsin(np.clip(d[..., 1] / np.linalg.norm(d, axis=-1), -1, 1)))
    return lon, lat


def _lonlat_to_dirs(lon, lat):
    lon = np.radians(np.asarray(lon, dtype=np.float64))
    lat = np.radians(np.asarray(lat, dtype=np.float64))
    return np.stack([np.cos(lat) * np.sin(lon),
                     np.sin(lat),
                     np.cos(lat) * np.cos(lon)], axis=-1)


def _sample_pano(pano: EquirectPanorama, lon, lat) -> np.ndarray:
    half = pano.lon_span / 2
    if pano.full_sphere:
        # wrap into [-180, 180) before the pixel transform
        lon = (np.asarray(lon) + 180.0) % 360.0 - 180.0
    elif np.any(lon < -half) or np.any(lon > half):
        raise CoverageError("view footprint exceeds panorama coverage")
    x = (np.asarray(lon) / pano.lon_span + 0.5) * pano.width - 0.5
    y = (0.5 - np.asarray(lat) / pano.LAT_SPAN) * pano.height - 0.5
    return bilinear_sample(pano.image, x, y, wrap_x=pano.full_sphere)


def extract_view(pano: EquirectPanorama, view: ViewSpec, out_w: int, out_h: int) -> np.ndarray:
    """Render a gnomonic view of the panorama (bilinear resampling)."""
    forward, right, up = _camera_basis(view)
    tan_h = np.tan(np.radians(view.fov_h / 2))
    tan_v = np.tan(np.radians(view.fov_v / 2))
    u = (2 * (np.arange(out_w) + 0.5) / out_w - 1) * tan_h
    v = (1 - 2 * (np.arange(out_h) + 0.5) / out_h) * tan_v
    rays = (forward[None, None, :]
            + u[None, :, None] * right[None, None, :]
            + v[:, None, None] * up[None, None, :])
    lon, lat = _dirs_to_lonlat(rays)
    return _sample_pano(pano, lon, lat)


def insert_view(canvas: EquirectPanorama, perspective: np.ndarray,
                view: ViewSpec) -> tuple[EquirectPanorama, np.ndarray]:
    """Project a perspective image onto an equirect canvas.

    Returns the written panorama and a boolean mask of the pixels inside
    the view frustum; pixels outside are bit-identical to the canvas.
    """
    perspective = validate_raster(perspective)
    forward, right, up = _camera_basis(view)
    h, w = canvas.height, canvas.width
    xs = np.arange(w, dtype=np.float64)
    ys = np.arange(h, dtype=np.float64)
    lon, lat = pixel_to_lonlat(canvas, *np.meshgrid(xs, ys))
    d = _lonlat_to_dirs(lon, lat)

    df = d @ forward
    inside = df > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(inside, (d @ right) / df, 0.0)
        v = np.where(inside, (d @ up) / df, 0.0)
    tan_h = np.tan(np.radians(view.fov_h / 2))
    tan_v = np.tan(np.radians(view.fov_v / 2))
    inside &= (np.abs(u) <= tan_h) & (np.abs(v) <= tan_v)

    ph, pw = perspective.shape[:2]
    px = (u / tan_h + 1) / 2 * pw - 0.5
    py = (1 - v / tan_v) / 2 * ph - 0.5
    sampled = bilinear_sample(perspective, px, py)

    out = canvas.image.copy()
    out[inside] = sampled[inside]
    return EquirectPanorama(out, canvas.lon_span), inside


def central_half_crop(pano: EquirectPanorama, yaw: float = 0.0) -> np.ndarray:
    """The 180x180-degree equirect window centered on the given yaw.

    Wraps cyclically across the +-180 seam (used for the "back" direction).
    """
    if not pano.full_sphere:
        raise CoverageError("central-half crop needs a full-sphere panorama")
    w = pano.width
    cols = w // 2
    # first column whose center lon is >= yaw - 90
    start = int(round((yaw - 90.0 + 180.0) / 360.0 * w))
    idx = (start + np.arange(cols)) % w
    return pano.image[:, idx].copy()


def make_pairs(pano: EquirectPanorama, native: int = 512) -> list[PairTriple]:
    """Build the four direction-wise training triples from a full-sphere pano.

    For each horizon-level direction: a 90-degree view (near target), the
    180-degree equirect window around it (mid target), and the central
    quarter of the near view (narrow input); all resized to 256x256.
    """
    if not pano.full_sphere:
        raise CoverageError("pair extraction needs a full-sphere panorama")
    triples = []
    for direction, yaw in DIRECTIONS.items():
        view = ViewSpec(yaw=yaw if yaw < 180 else -180.0, pitch=0.0, fov_h=90.0, fov_v=90.0)
        near_native = extract_view(pano, view, native, native)
        mid = central_half_crop(pano, yaw=yaw)
        narrow = crop_central_quarter(near_native)
        triples.append(PairTriple(
            input_narrow=resize(narrow, 256, 256),
            target_near=resize(near_native, 256, 256),
            target_mid=resize(mid, 256, 256),
            direction=direction,
        ))
    return triples


def mirror_extend(pano: EquirectPanorama) -> EquirectPanorama:
    """Extend a 180-degree panorama to 360 by mirroring the front hemisphere.

    The rear hemisphere reflects about the +-90-degree meridians, which
    makes both side seams and the +-180 wrap continuous; the front half of
    the result is bit-identical to the input.
    """
    if pano.full_sphere:
        raise DomainError("panorama already covers 360 degrees")
    img = pano.image
    w = pano.width
    if w % 2:
        raise DomainError("mirror extension needs an even width")
    half = w // 2
    left = img[:, half - 1::-1]          # lon in [-180, -90): reflection of front-left
    right_block = img[:, :half - 1:-1]   # lon in [90, 180): reflection of front-right
    out = np.concatenate([left, img, right_block], axis=1)
    return EquirectPanorama(out, 360.0)
