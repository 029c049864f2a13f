"""Full-reference image quality metrics and a directory evaluation harness."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError
from .raster import load_png

PSNR_INF = float("inf")


def _check_pair(a: np.ndarray, b: np.ndarray):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InputError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB with peak 1; +inf for identical images."""
    a, b = _check_pair(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return PSNR_INF
    return 10.0 * math.log10(1.0 / mse)


def nrmse(a: np.ndarray, b_reference: np.ndarray) -> float:
    """RMSE normalized by the reference's dynamic range (max - min)."""
    a, b = _check_pair(a, b_reference)
    rng = float(b.max() - b.min())
    if rng == 0.0:
        raise InputError("reference image is constant; range normalization undefined")
    return float(np.sqrt(np.mean((a - b) ** 2))) / rng


@dataclass
class MetricReport:
    """Per-image metric rows plus aggregate means (by direction and overall)."""

    rows: list = field(default_factory=list)  # dicts: id, direction, psnr, nrmse
    missing: list = field(default_factory=list)

    def aggregate(self) -> dict:
        def mean_of(vals):
            finite = [v for v in vals if math.isfinite(v)]
            if not vals:
                return None
            if not finite:  # all pairs identical
                return PSNR_INF
            return sum(finite) / len(finite)

        out = {"overall": {
            "count": len(self.rows),
            "mean_psnr": mean_of([r["psnr"] for r in self.rows]),
            "mean_nrmse": mean_of([r["nrmse"] for r in self.rows]),
        }}
        directions = sorted({r["direction"] for r in self.rows if r.get("direction")})
        for d in directions:
            sub = [r for r in self.rows if r.get("direction") == d]
            out[d] = {
                "count": len(sub),
                "mean_psnr": mean_of([r["psnr"] for r in sub]),
                "mean_nrmse": mean_of([r["nrmse"] for r in sub]),
            }
        return out

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["id", "direction", "psnr_db", "nrmse"])
            for r in self.rows:
                writer.writerow([r["id"], r.get("direction", ""),
                                 "inf" if math.isinf(r["psnr"]) else f"{r['psnr']:.6f}",
                                 f"{r['nrmse']:.6f}"])

    def to_json(self) -> str:
        def enc(v):
            return "inf" if isinstance(v, float) and math.isinf(v) else v

        payload = {
            "aggregate": {k: {kk: enc(vv) for kk, vv in v.items()}
                          for k, v in self.aggregate().items()},
            "missing": self.missing,
        }
        return json.dumps(payload, indent=2)


def read_manifest(path) -> list[dict]:
    """JSON-lines manifest; each row needs at least an `id` field."""
    entries = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line:
                entries.append(json.loads(line))
    if not entries:
        raise InputError(f"manifest {path} is empty")
    return entries


def evaluate(pred_dir, gt_dir, manifest_entries: list[dict]) -> MetricReport:
    """Score prediction files against ground truth, aligned by manifest id.

    Rows use `pred`/`gt` relative paths when present, else `<id>.png`.
    Missing files are listed in the report, never silently skipped.
    """
    pred_dir = Path(pred_dir)
    gt_dir = Path(gt_dir)
    report = MetricReport()
    for entry in manifest_entries:
        if "id" not in entry:
            raise InputError(f"manifest entry missing id: {entry}")
        pid = str(entry["id"])
        pred_path = pred_dir / entry.get("pred", f"{pid}.png")
        gt_path = gt_dir / entry.get("gt", f"{pid}.png")
        if not pred_path.exists() or not gt_path.exists():
            report.missing.append({
                "id": pid,
                "pred": str(pred_path), "pred_exists": pred_path.exists(),
                "gt": str(gt_path), "gt_exists": gt_path.exists(),
            })
            continue
        a = load_png(pred_path)
        b = load_png(gt_path)
        report.rows.append({
            "id": pid,
            "direction": entry.get("direction", ""),
            "psnr": psnr(a, b),
            "nrmse": nrmse(a, b),
        })
    if not report.rows:
        raise InputError("no prediction/ground-truth pairs could be scored")
    return report
