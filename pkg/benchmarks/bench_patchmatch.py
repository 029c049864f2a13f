"""Compare the compiled patch-search kernels against the pure-Python fallback.

Runs the same extrapolation fill on both backends (the fallback is forced
in a subprocess via PANOFOV_PURE_PYTHON=1), reports wall times, speedup
and the maximum absolute difference between the two results.

Usage: python benchmarks/bench_patchmatch.py [--size 96] [--repeats 3]
"""
import argparse
import json
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

WORKER = """
import json, sys, time
import numpy as np
from panofov._kernels import BACKEND_NAME
from panofov.patch import PatchParams, patchmatch_fill

case = np.load(sys.argv[1])
repeats = int(sys.argv[2])
params = PatchParams(7, 3, 5)
times = []
for _ in range(repeats):
    t0 = time.perf_counter()
    result = patchmatch_fill(case["img"], case["known"], params, seed=0)
    times.append(time.perf_counter() - t0)
np.save(sys.argv[3], result)
print(json.dumps({"backend": BACKEND_NAME, "times": times}))
"""


def run_backend(case_path, out_path, repeats, pure):
    env = dict(os.environ)
    env.pop("PANOFOV_PURE_PYTHON", None)
    if pure:
        env["PANOFOV_PURE_PYTHON"] = "1"
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, str(case_path), str(repeats), str(out_path)],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=96,
                        help="image side length (default 96)")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.RandomState(0)
    size = args.size
    x = np.arange(size)
    stripes = 0.5 + 0.5 * np.sin(2 * np.pi * x / 8)
    img = np.stack([np.tile(stripes, (size, 1))] * 3, axis=-1)
    img += rng.rand(size, size, 3) * 0.05
    img = np.clip(img, 0, 1)
    known = np.zeros((size, size), dtype=bool)
    q = size // 4
    known[q:size - q, q:size - q] = True
    img[~known] = 0.0

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        case = tmp / "case.npz"
        np.savez(case, img=img, known=known)
        out_c = tmp / "compiled.npy"
        out_p = tmp / "pure.npy"
        compiled = run_backend(case, out_c, args.repeats, pure=False)
        pure = run_backend(case, out_p, args.repeats, pure=True)
        diff = float(np.abs(np.load(out_c) - np.load(out_p)).max())

    tc = min(compiled["times"])
    tp = min(pure["times"])
    print(f"image {size}x{size}, fill ring width {q}, "
          f"best of {args.repeats} runs")
    print(f"  {compiled['backend']:>7}: {tc:8.3f} s")
    print(f"  {pure['backend']:>7}: {tp:8.3f} s")
    print(f"  speedup: {tp / tc:6.1f}x")
    print(f"  max abs difference between results: {diff:.3e}")


if __name__ == "__main__":
    main()
