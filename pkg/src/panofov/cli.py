"""Command line interface."""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import fusion as fusion_mod
from .dataset import find_panoramas, prepare_dataset
from .foveation import FoveatedLayout, FoveationModel, resolution_profile
from .generator import GeneratorStage
from .metrics import evaluate, read_manifest
from .pipeline import PipelineConfig, run_batch, run_to_dir, with_overrides
from .projection import EquirectPanorama, mirror_extend
from .raster import load_png, save_png


def _load_config(config_path, **overrides) -> PipelineConfig:
    if config_path:
        cfg = PipelineConfig.from_dict(json.loads(Path(config_path).read_text()))
    else:
        cfg = PipelineConfig()
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        cfg = with_overrides(cfg, **overrides)
    return cfg


@click.group()
def main():
    """Foveated panoramic outpainting toolkit."""


@main.command("run")
@click.argument("input_path", type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--extend-360/--no-extend-360", "extend", default=None)
@click.option("--output-height", type=int, default=None)
@click.option("--mid-downscale", type=click.Choice(["1", "2", "4"]), default=None)
@click.option("--seed", type=int, default=None)
def run_cmd(input_path, out_dir, config_path, extend, output_height,
            mid_downscale, seed):
    """Expand one narrow image to a 180 (and optionally 360) degree panorama."""
    cfg = _load_config(config_path, extend_to_360=extend,
                       output_height=output_height,
                       mid_downscale=int(mid_downscale) if mid_downscale else None,
                       seed=seed)
    manifest = run_to_dir(cfg, input_path, out_dir)
    click.echo(json.dumps({"artifacts": manifest["artifacts"],
                           "seam": manifest["seam"]}, indent=2))


@main.command("run-batch")
@click.option("--inputs", "input_dir", required=True, type=click.Path(exists=True),
              help="Directory of input images.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--seed", type=int, default=None)
def run_batch_cmd(input_dir, out_dir, config_path, seed):
    """Run the pipeline over every image in a directory."""
    cfg = _load_config(config_path, seed=seed)
    paths = find_panoramas(input_dir)
    summary = run_batch(cfg, paths, out_dir)
    click.echo(json.dumps({"n_ok": summary["n_ok"],
                           "n_failed": summary["n_failed"],
                           "wall_time_s": summary["wall_time_s"]}, indent=2))
    if summary["n_failed"]:
        sys.exit(1)


@main.command("prepare-dataset")
@click.option("--inputs", "input_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--native", type=int, default=512, show_default=True,
              help="Intermediate extraction resolution before the 256 resize.")
def prepare_dataset_cmd(input_dir, out_dir, native):
    """Build direction-wise training triples from full-sphere panoramas."""
    entries = prepare_dataset(input_dir, out_dir, native=native)
    click.echo(f"wrote {len(entries)} pairs to {out_dir}")


@main.command("fuse")
@click.option("--original", required=True, type=click.Path(exists=True))
@click.option("--generated", required=True, type=click.Path(exists=True))
@click.option("--stage", required=True, type=click.Choice(["near", "mid"]))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--method", type=click.Choice(["overlay", "poisson"]), default="poisson",
              show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--max-iters", type=int, default=0,
              help="0 selects the size-based default.")
def fuse_cmd(original, generated, stage, out_path, method, tol, max_iters):
    """Fuse an original image with generated peripheral content."""
    cfg = fusion_mod.FusionConfig(method=method, cg_tolerance=tol,
                                  cg_max_iters=max_iters)
    canvas, mask = fusion_mod.align(load_png(original), load_png(generated),
                                    GeneratorStage(stage))
    before = fusion_mod.seam_discontinuity(canvas, mask)
    fused = fusion_mod.fuse(canvas, mask, cfg)
    save_png(out_path, fused)
    click.echo(json.dumps({
        "out": str(out_path),
        "seam_before": before,
        "seam_after": fusion_mod.seam_discontinuity(fused, mask),
    }, indent=2))


@main.command("evaluate")
@click.option("--pred", "pred_dir", required=True, type=click.Path(exists=True))
@click.option("--gt", "gt_dir", required=True, type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", required=True,
              type=click.Path(exists=True))
@click.option("--out", "out_csv", required=True, type=click.Path())
def evaluate_cmd(pred_dir, gt_dir, manifest_path, out_csv):
    """Score predictions against ground truth (PSNR / NRMSE)."""
    report = evaluate(pred_dir, gt_dir, read_manifest(manifest_path))
    report.write_csv(out_csv)
    click.echo(report.to_json())


@main.command("extend360")
@click.argument("input_path", type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def extend360_cmd(input_path, out_path):
    """Mirror-extend a 180-degree panorama to 360 degrees."""
    pano = EquirectPanorama(load_png(input_path), 180.0)
    save_png(out_path, mirror_extend(pano).image)
    click.echo(f"wrote {out_path}")


@main.group()
def foveation():
    """Peripheral-acuity model tools."""


@foveation.command("profile")
@click.option("--beta", type=float, default=2.5, show_default=True)
@click.option("--r1", type=float, default=1.0, show_default=True)
@click.option("--step", type=float, default=1.0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="CSV output path (default: stdout).")
def foveation_profile_cmd(beta, r1, step, out_path):
    """Emit the required-vs-system resolution profile as CSV."""
    rows = resolution_profile(FoveationModel(beta), FoveatedLayout(), r1, step)
    lines = ["theta_deg,required,system"]
    lines += [f"{t:.6g},{req:.9g},{system:.9g}" for t, req, system in rows]
    text = "\n".join(lines) + "\n"
    if out_path:
        Path(out_path).write_text(text)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    main()
