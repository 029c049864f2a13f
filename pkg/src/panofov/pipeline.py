"""End-to-end orchestration: narrow input to 180/360-degree panorama.

Stages: preprocess -> near generation -> perspective-domain fusion ->
mid generation (fed the fused 90-degree result) -> insertion into the
equirect canvas -> equirect-domain fusion -> optional mirror extension.
Mid-periphery content enters the canvas through a reduced-resolution
bottleneck (quarter by default), matching the acuity budget of the
foveated layout.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import fusion as fusion_mod
from .errors import BatchError, InputError, PanofovError
from .foveation import FoveatedLayout
from .generator import (NET_SIZE, GeneratorSpec, GeneratorStage, build_generator,
                        preprocess_input)
from .projection import EquirectPanorama, mirror_extend
from .raster import load_png, resize, save_png, validate_raster


class StageError(PanofovError):
    """A generator or fusion error with pipeline-stage attribution."""


@dataclass(frozen=True)
class PipelineConfig:
    near_generator: GeneratorSpec = field(default_factory=GeneratorSpec)
    mid_generator: GeneratorSpec = field(default_factory=GeneratorSpec)
    fusion: fusion_mod.FusionConfig = field(default_factory=fusion_mod.FusionConfig)
    layout: FoveatedLayout = field(default_factory=FoveatedLayout)
    output_height: int = 512
    extend_to_360: bool = False
    mid_downscale: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.output_height < 64:
            raise InputError("output_height must be >= 64")
        if self.mid_downscale not in (1, 2, 4):
            raise InputError("mid_downscale must be 1, 2 or 4")

    def to_dict(self) -> dict:
        return {
            "near_generator": {"kind": self.near_generator.kind,
                               "params": self.near_generator.params,
                               "external_command": self.near_generator.external_command},
            "mid_generator": {"kind": self.mid_generator.kind,
                              "params": self.mid_generator.params,
                              "external_command": self.mid_generator.external_command},
            "fusion": {"method": self.fusion.method,
                       "cg_tolerance": self.fusion.cg_tolerance,
                       "cg_max_iters": self.fusion.cg_max_iters,
                       "precondition": self.fusion.precondition},
            "layout": {"center_fov": self.layout.center_fov,
                       "near_fov": self.layout.near_fov,
                       "mid_fov": self.layout.mid_fov},
            "output_height": self.output_height,
            "extend_to_360": self.extend_to_360,
            "mid_downscale": self.mid_downscale,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        kwargs = {}
        for key in ("near_generator", "mid_generator"):
            if key in d:
                kwargs[key] = GeneratorSpec(**d[key])
        if "fusion" in d:
            kwargs["fusion"] = fusion_mod.FusionConfig(**d["fusion"])
        if "layout" in d:
            kwargs["layout"] = FoveatedLayout(**d["layout"])
        for key in ("output_height", "extend_to_360", "mid_downscale", "seed"):
            if key in d:
                kwargs[key] = d[key]
        return cls(**kwargs)


@dataclass
class RunResult:
    pano_180: EquirectPanorama
    pano_360: EquirectPanorama | None
    manifest: dict


def _stage(name: str):
    """Re-raise package errors with stage attribution."""
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, PanofovError):
                raise StageError(f"[stage {name}] {exc}") from exc
            return False
    return _Ctx()


def run(config: PipelineConfig, input_img: np.ndarray,
        near_generator=None, mid_generator=None) -> RunResult:
    """Run the two-stage pipeline on one narrow-FoV image.

    Generator callables may be injected (tests use ground-truth oracles);
    by default they are built from the config specs.
    """
    input_img = validate_raster(input_img)
    if input_img.shape[0] < 64 or input_img.shape[1] < 64:
        raise InputError("input must be at least 64x64")
    near_gen = near_generator or build_generator(config.near_generator)
    mid_gen = mid_generator or build_generator(config.mid_generator)
    layout = config.layout
    manifest: dict = {"config": config.to_dict(), "timings_s": {}, "seam": {}}
    t0 = time.perf_counter()

    with _stage("near-generation"):
        near_in = preprocess_input(input_img, GeneratorStage.NEAR)
        gen_near = np.clip(near_gen(near_in, GeneratorStage.NEAR, config.seed), 0, 1)
    manifest["timings_s"]["near_generation"] = time.perf_counter() - t0

    t1 = time.perf_counter()
    with _stage("near-fusion"):
        inner = int(round(layout.center_ratio * NET_SIZE))
        original = resize(input_img, inner, inner)
        canvas1, mask1 = fusion_mod.align(original, gen_near,
                                          GeneratorStage.NEAR, layout)
        seam_before = fusion_mod.seam_discontinuity(canvas1, mask1)
        fused90 = fusion_mod.fuse(canvas1, mask1, config.fusion)
        manifest["seam"]["near"] = {
            "before": seam_before,
            "after": fusion_mod.seam_discontinuity(fused90, mask1),
        }
    manifest["timings_s"]["near_fusion"] = time.perf_counter() - t1

    t2 = time.perf_counter()
    with _stage("mid-generation"):
        mid_in = preprocess_input(fused90, GeneratorStage.MID)
        gen_mid = np.clip(mid_gen(mid_in, GeneratorStage.MID, config.seed + 1), 0, 1)
    manifest["timings_s"]["mid_generation"] = time.perf_counter() - t2

    t3 = time.perf_counter()
    with _stage("mid-fusion"):
        eq = config.output_height
        low = max(8, eq // config.mid_downscale)
        mid_equirect = resize(resize(gen_mid, low, low), eq, eq)
        canvas2, mask2 = fusion_mod.align(fused90, mid_equirect,
                                          GeneratorStage.MID, layout)
        seam_before = fusion_mod.seam_discontinuity(canvas2, mask2)
        fused180 = fusion_mod.fuse(canvas2, mask2, config.fusion)
        manifest["seam"]["mid"] = {
            "before": seam_before,
            "after": fusion_mod.seam_discontinuity(fused180, mask2),
        }
        pano180 = EquirectPanorama(fused180, 180.0)
    manifest["timings_s"]["mid_fusion"] = time.perf_counter() - t3

    pano360 = None
    if config.extend_to_360:
        with _stage("mirror-extension"):
            pano360 = mirror_extend(pano180)
    manifest["timings_s"]["total"] = time.perf_counter() - t0
    return RunResult(pano180, pano360, manifest)


def run_to_dir(config: PipelineConfig, input_path, out_dir,
               near_generator=None, mid_generator=None) -> dict:
    """Run on an image file and write pano180.png (+ pano360.png) + manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    img = load_png(input_path)
    result = run(config, img, near_generator, mid_generator)
    manifest = result.manifest
    manifest["input"] = str(input_path)
    manifest["artifacts"] = {}

    p180 = out_dir / "pano180.png"
    save_png(p180, result.pano_180.image)
    manifest["artifacts"]["pano180"] = str(p180)
    if result.pano_360 is not None:
        p360 = out_dir / "pano360.png"
        save_png(p360, result.pano_360.image)
        manifest["artifacts"]["pano360"] = str(p360)
    mpath = out_dir / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2))
    manifest["artifacts"]["manifest"] = str(mpath)
    return manifest


def run_batch(config: PipelineConfig, input_paths: list, out_dir) -> dict:
    """Run the pipeline per input, isolating per-item failures."""
    if not input_paths:
        raise InputError("batch manifest is empty")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    items = []
    failures = 0
    t0 = time.perf_counter()
    for path in input_paths:
        path = Path(path)
        item_dir = out_dir / path.stem
        try:
            manifest = run_to_dir(config, path, item_dir)
            items.append({"input": str(path), "ok": True,
                          "out_dir": str(item_dir),
                          "seam": manifest["seam"]})
        except Exception as exc:  # noqa: BLE001 - per-item isolation
            failures += 1
            items.append({"input": str(path), "ok": False, "error": str(exc)})
    summary = {
        "config": config.to_dict(),
        "items": items,
        "n_ok": len(items) - failures,
        "n_failed": failures,
        "wall_time_s": time.perf_counter() - t0,
    }
    (out_dir / "batch_manifest.json").write_text(json.dumps(summary, indent=2))
    if failures == len(items):
        raise BatchError("every batch item failed")
    return summary


def with_overrides(config: PipelineConfig, **kwargs) -> PipelineConfig:
    return replace(config, **kwargs)
