"""Pluggable peripheral-content generators.

Every generator maps a preprocessed 256x256 input to a 256x256 output in
[0,1]. Stage NEAR widens a narrow view to the 90-degree plane; stage MID
produces the 180-degree equirect-domain content from the fused 90-degree
result. Built-ins are pure given (input, params, seed); neural models run
out of process through a command-template protocol.
"""
from __future__ import annotations

import enum
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, ExternalGeneratorError, InputError
from .patch import PatchParams, patchmatch_fill
from .raster import load_png, resize, save_png, validate_raster

NET_SIZE = 256


class GeneratorStage(enum.Enum):
    NEAR = "near"
    MID = "mid"


@dataclass(frozen=True)
class GeneratorSpec:
    """Which generator backs a stage, with its settings."""

    kind: str = "resize_baseline"
    params: dict = field(default_factory=dict)
    external_command: str = ""

    KINDS = ("resize_baseline", "mirror_pad", "patch_extrapolate", "external")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise DomainError(f"unknown generator kind {self.kind!r}")
        if self.kind == "external":
            if "{input}" not in self.external_command or "{output}" not in self.external_command:
                raise DomainError(
                    "external generator needs a command with {input} and {output}")


def preprocess_input(img: np.ndarray, stage: GeneratorStage) -> np.ndarray:
    """Resize (never zero-pad) to the fixed 256x256 network domain.

    Resizing deliberately breaks pixel alignment between input and output,
    which is what prevents boundary halos from direct copying.
    """
    img = validate_raster(img)
    del stage  # both stages share the fixed network domain
    if img.shape[:2] == (NET_SIZE, NET_SIZE):
        return img.copy()
    return resize(img, NET_SIZE, NET_SIZE)


def _inner_size(params: dict) -> int:
    # the input content occupies the central half of the output plane
    return int(params.get("inner_size", NET_SIZE // 2))


def resize_baseline(img: np.ndarray, stage: GeneratorStage) -> np.ndarray:
    """Stretch the input over the whole output domain; no new content."""
    img = validate_raster(img)
    del stage
    return resize(img, NET_SIZE, NET_SIZE)


def mirror_pad(img: np.ndarray, stage: GeneratorStage,
               params: dict | None = None) -> np.ndarray:
    """Shrink the input to the central region and reflect it outward."""
    img = validate_raster(img)
    del stage
    inner = _inner_size(params or {})
    core = resize(img, inner, inner)
    pad_lo = (NET_SIZE - inner) // 2
    pad_hi = NET_SIZE - inner - pad_lo
    return np.pad(core, ((pad_lo, pad_hi), (pad_lo, pad_hi), (0, 0)), mode="reflect")


def patch_extrapolate(img: np.ndarray, known: np.ndarray,
                      params: PatchParams | None = None, seed: int = 0) -> np.ndarray:
    """Complete the unknown region by coarse-to-fine patch synthesis."""
    return patchmatch_fill(img, known, params or PatchParams(), seed=seed)


def _patch_generate(img: np.ndarray, stage: GeneratorStage, params: dict,
                    seed: int) -> np.ndarray:
    del stage
    inner = _inner_size(params)
    pp = PatchParams(
        patch_size=int(params.get("patch_size", 7)),
        pyramid_levels=int(params.get("pyramid_levels", 4)),
        iterations_per_level=int(params.get("iterations_per_level", 5)),
        search_region=int(params.get("search_region", 0)),
    )
    canvas = np.zeros((NET_SIZE, NET_SIZE, 3))
    known = np.zeros((NET_SIZE, NET_SIZE), dtype=bool)
    y0 = (NET_SIZE - inner) // 2
    canvas[y0:y0 + inner, y0:y0 + inner] = resize(img, inner, inner)
    known[y0:y0 + inner, y0:y0 + inner] = True
    return patch_extrapolate(canvas, known, pp, seed=seed)


def external_generate(spec: GeneratorSpec, inputs: list, stage: GeneratorStage,
                      workdir=None) -> list[np.ndarray]:
    """Run the external command once per input file and read back the PNGs.

    The template receives {input}, {output} and {stage}; outputs must be
    exactly 256x256 RGB and the command must exit 0.
    """
    if spec.kind != "external":
        raise InputError("external_generate needs an external GeneratorSpec")
    results = []
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        for i, inp in enumerate(inputs):
            inp = Path(inp)
            if not inp.exists():
                raise InputError(f"input file not found: {inp}")
            out_path = Path(tmp) / f"out_{i:04d}.png"
            cmd = spec.external_command.format(
                input=shlex.quote(str(inp)),
                output=shlex.quote(str(out_path)),
                stage=stage.value,
            )
            proc = subprocess.run(cmd, shell=True, capture_output=True, text=True)
            transcript = (f"$ {cmd}\nexit={proc.returncode}\n"
                          f"stdout:\n{proc.stdout}\nstderr:\n{proc.stderr}")
            if proc.returncode != 0:
                raise ExternalGeneratorError(
                    f"external generator exited {proc.returncode}", transcript)
            if not out_path.exists():
                raise ExternalGeneratorError(
                    f"external generator produced no output for {inp}", transcript)
            img = load_png(out_path)
            if img.shape[:2] != (NET_SIZE, NET_SIZE):
                raise ExternalGeneratorError(
                    f"external output is {img.shape[1]}x{img.shape[0]}, "
                    f"expected {NET_SIZE}x{NET_SIZE}", transcript)
            results.append(img)
            out_path.unlink()
    return results


class BuiltinGenerator:
    """Callable wrapper dispatching on a GeneratorSpec."""

    def __init__(self, spec: GeneratorSpec):
        self.spec = spec

    def __call__(self, img: np.ndarray, stage: GeneratorStage, seed: int = 0) -> np.ndarray:
        kind = self.spec.kind
        if kind == "resize_baseline":
            return resize_baseline(img, stage)
        if kind == "mirror_pad":
            return mirror_pad(img, stage, self.spec.params)
        if kind == "patch_extrapolate":
            return _patch_generate(img, stage, self.spec.params, seed)
        raise InputError(f"{kind} is not a built-in generator")


class ExternalGenerator:
    """Callable wrapper routing single images through the subprocess protocol."""

    def __init__(self, spec: GeneratorSpec):
        self.spec = spec

    def __call__(self, img: np.ndarray, stage: GeneratorStage, seed: int = 0) -> np.ndarray:
        del seed
        with tempfile.TemporaryDirectory() as tmp:
            in_path = Path(tmp) / "in.png"
            save_png(in_path, img)
            return external_generate(self.spec, [in_path], stage, workdir=tmp)[0]


def build_generator(spec: GeneratorSpec):
    if spec.kind == "external":
        return ExternalGenerator(spec)
    return BuiltinGenerator(spec)
