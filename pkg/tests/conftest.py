import numpy as np
import pytest

from panofov.projection import EquirectPanorama


def smooth_pano_image(h=256, w=512):
    """Low-frequency full-sphere test pattern (band-limited, no seams)."""
    lon = ((np.arange(w) + 0.5) / w - 0.5) * 2 * np.pi
    lat = (0.5 - (np.arange(h) + 0.5) / h) * np.pi
    LON, LAT = np.meshgrid(lon, lat)
    r = 0.5 + 0.35 * np.sin(LON) * np.cos(LAT)
    g = 0.5 + 0.35 * np.sin(LAT)
    b = 0.5 + 0.2 * np.cos(2 * LON) * np.cos(LAT) + 0.1 * np.sin(3 * LAT)
    return np.clip(np.stack([r, g, b], axis=-1), 0.0, 1.0)


@pytest.fixture
def smooth_pano():
    return EquirectPanorama(smooth_pano_image(), 360.0)


@pytest.fixture
def rng():
    return np.random.RandomState(42)
