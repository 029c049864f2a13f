"""Foveated panoramic outpainting: two-stage peripheral generation with
gradient-domain fusion, plus the projection, acuity-model, dataset and
metric tooling around it."""

from .foveation import (FoveatedLayout, FoveationModel, input_fov,
                        relative_resolution, required_resolution,
                        resolution_profile)
from .fusion import (BlendMask, FusionConfig, align, overlay, poisson_blend,
                     seam_discontinuity)
from .generator import (GeneratorSpec, GeneratorStage, build_generator,
                        external_generate, mirror_pad, patch_extrapolate,
                        preprocess_input, resize_baseline)
from .metrics import evaluate, nrmse, psnr
from .pipeline import PipelineConfig, run, run_batch
from .projection import (EquirectPanorama, PairTriple, ViewSpec, extract_view,
                         insert_view, lonlat_to_pixel, make_pairs,
                         mirror_extend, pixel_to_lonlat)
from .raster import crop_central_quarter, load_png, resize, save_png

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
