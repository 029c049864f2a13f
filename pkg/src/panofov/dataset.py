"""Training-pair extraction over a directory of full-sphere panoramas."""
from __future__ import annotations

import json
from pathlib import Path

from .errors import InputError
from .projection import EquirectPanorama, make_pairs
from .raster import load_png, save_png

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def find_panoramas(input_dir) -> list[Path]:
    input_dir = Path(input_dir)
    paths = sorted(p for p in input_dir.iterdir()
                   if p.suffix.lower() in IMAGE_SUFFIXES)
    if not paths:
        raise InputError(f"no panorama images found in {input_dir}")
    return paths


def prepare_dataset(input_dir, out_dir, native: int = 512) -> list[dict]:
    """Extract the four direction triples per panorama.

    Writes pairs/<pano-id>/<direction>/{input,near,mid}.png under out_dir
    plus a JSON-lines manifest; returns the manifest entries.
    """
    out_dir = Path(out_dir)
    pairs_dir = out_dir / "pairs"
    pairs_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for path in find_panoramas(input_dir):
        img = load_png(path)
        pano = EquirectPanorama(img, 360.0)
        for triple in make_pairs(pano, native=native):
            dir_path = pairs_dir / path.stem / triple.direction
            dir_path.mkdir(parents=True, exist_ok=True)
            save_png(dir_path / "input.png", triple.input_narrow)
            save_png(dir_path / "near.png", triple.target_near)
            save_png(dir_path / "mid.png", triple.target_mid)
            entries.append({
                "pano_id": path.stem,
                "direction": triple.direction,
                "input": str(dir_path / "input.png"),
                "near": str(dir_path / "near.png"),
                "mid": str(dir_path / "mid.png"),
            })
    manifest_path = out_dir / "manifest.jsonl"
    with open(manifest_path, "w") as f:
        for entry in entries:
            f.write(json.dumps(entry) + "\n")
    return entries
