"""Acceptance gate: one test per headline guarantee.

Each test prints a single PASS line (reaching the print implies every
assertion held); a failure shows up as the usual pytest failure instead.
"""
import itertools
import math
import time

import numpy as np
import pytest

from panofov.foveation import (FoveatedLayout, FoveationModel, input_fov,
                               relative_resolution, required_resolution,
                               resolution_profile)
from panofov.fusion import (FILL, KEEP, OUTSIDE, BlendMask, FusionConfig,
                            poisson_blend, seam_discontinuity)
from panofov.metrics import PSNR_INF, nrmse, psnr
from panofov.pipeline import PipelineConfig, run, run_batch
from panofov.projection import (EquirectPanorama, ViewSpec, central_half_crop,
                                extract_view, insert_view, lonlat_to_pixel,
                                make_pairs, mirror_extend, pixel_to_lonlat)
from panofov.raster import resize, save_png
from panofov.dataset import prepare_dataset

from conftest import smooth_pano_image
from test_fusion import dense_blend_oracle


@pytest.fixture
def announce(capfd):
    def _announce(text):
        with capfd.disabled():
            print(f"ACCEPTANCE PASS: {text}")
    return _announce


def test_input_fov_geometry(announce):
    value = input_fov(0.5, 90.0)
    assert abs(value - 53.1301) <= 0.001
    announce(f"input field of view for half-tangent extension = "
             f"{value:.4f} deg (53.1301 +/- 0.001)")


def test_required_resolution_bound_and_profile_domination(announce):
    model = FoveationModel(2.5)
    value = required_resolution(model, 26.565, 45.0, 1.0)
    assert abs(value - 0.1195) <= 0.0005
    rows = resolution_profile(model, FoveatedLayout(), r1=1.0, step=1.0)
    assert all(system >= required for _, required, system in rows)
    announce(f"near-edge resolution bound = {value:.4f} (0.1195 +/- 0.0005); "
             f"system curve dominates required at all {len(rows)} "
             f"1-degree samples")


def test_acuity_model(announce):
    model = FoveationModel(2.5)
    assert relative_resolution(model, 2.5) == 0.5
    rng = np.random.RandomState(0)
    thetas = np.sort(rng.uniform(0.0, 179.0, 1000))
    values = [relative_resolution(model, t) for t in thetas]
    assert all(a > b for a, b in zip(values, values[1:]))
    announce("acuity r(2.5 deg) = 0.5 exactly; strictly decreasing over "
             "1000 random eccentricities")


def test_projection_round_trip(announce):
    pano = EquirectPanorama(smooth_pano_image(256, 512), 360.0)
    half = central_half_crop(pano)
    view = ViewSpec(0, 0, 90, 90)
    persp = extract_view(pano, view, 256, 256)
    written, mask = insert_view(EquirectPanorama(half, 180.0), persp, view)
    value = psnr(written.image[mask], half[mask])
    assert value >= 40.0

    rng = np.random.RandomState(1)
    lon = rng.uniform(-180, 180, 1000)
    lat = rng.uniform(-90, 90, 1000)
    x, y = lonlat_to_pixel(pano, lon, lat)
    lon2, lat2 = pixel_to_lonlat(pano, x, y)
    rt = max(np.abs(lon - lon2).max(), np.abs(lat - lat2).max())
    assert rt < 1e-9
    announce(f"projection round trip masked PSNR = {value:.2f} dB (>= 40); "
             f"lonlat/pixel round trip error = {rt:.2e} (< 1e-9)")


def test_dataset_preparation(announce, tmp_path):
    pano = EquirectPanorama(smooth_pano_image(128, 256), 360.0)
    triples = make_pairs(pano, native=128)
    assert len(triples) == 4
    for t in triples:
        for img in (t.input_narrow, t.target_near, t.target_mid):
            assert img.shape == (256, 256, 3)

    src = tmp_path / "panos"
    src.mkdir()
    n = 3
    for i in range(n):
        save_png(src / f"p{i}.png", smooth_pano_image(128, 256))
    entries = prepare_dataset(src, tmp_path / "dataset", native=128)
    assert len(entries) == 4 * n
    announce(f"one panorama -> 4 triples at 256x256; {n} panoramas -> "
             f"{len(entries)} manifest entries (4N)")


def test_poisson_solver_matches_dense_oracle(announce):
    tight = FusionConfig(cg_tolerance=1e-12)
    rng = np.random.RandomState(7)
    cases = 0

    def check(labels, canvas):
        got = poisson_blend(canvas, BlendMask(labels), tight)
        want = dense_blend_oracle(canvas, labels)
        assert np.abs(got - want).max() < 1e-8
        keep = labels == KEEP
        assert np.array_equal(got[keep], canvas[keep])

    # exhaustive square Fill blocks on a 6x6 grid, everything else Keep
    for size in (2, 3):
        for y0, x0 in itertools.product(range(6 - size + 1), repeat=2):
            labels = np.full((6, 6), KEEP, dtype=np.uint8)
            labels[y0:y0 + size, x0:x0 + size] = FILL
            check(labels, rng.rand(6, 6, 3))
            cases += 1

    for _ in range(100):
        labels = rng.choice([KEEP, FILL, OUTSIDE], size=(6, 6),
                            p=[0.4, 0.4, 0.2]).astype(np.uint8)
        check(labels, rng.rand(6, 6, 3))
        cases += 1

    # constant-canvas idempotence, exact
    canvas = np.full((6, 6, 3), 0.37)
    labels = np.full((6, 6), KEEP, dtype=np.uint8)
    labels[2:4, 2:4] = FILL
    out = poisson_blend(canvas, BlendMask(labels), tight)
    assert np.array_equal(out, canvas)
    announce(f"Poisson blend matched the dense direct solve to 1e-8 on "
             f"{cases} 6x6 masks (41 exhaustive blocks + 100 random); Keep "
             f"bit-identical; constant canvas unchanged bit for bit")


def test_seam_improvement_on_step_corpus(announce):
    worst = 0.0
    for step in (0.1, 0.2, 0.3, 0.4, 0.5):
        canvas = np.full((32, 32, 3), 0.25)
        canvas[:, 16:] = 0.25 + step
        keep = np.zeros((32, 32), dtype=bool)
        keep[:, :16] = True
        mask = BlendMask.from_keep(keep)
        before = seam_discontinuity(canvas, mask)
        after = seam_discontinuity(poisson_blend(canvas, mask), mask)
        assert after <= 0.2 * before
        worst = max(worst, after / before)
    announce(f"brightness-step seams reduced to <= 20% of overlay "
             f"(worst residual ratio {worst:.2e} over steps 0.1-0.5)")


def test_mirror_extension_symmetry(announce):
    half = central_half_crop(EquirectPanorama(smooth_pano_image(256, 512), 360.0))
    p360 = mirror_extend(EquirectPanorama(half, 180.0)).image
    w = half.shape[1]
    assert np.array_equal(p360[:, w // 2:w // 2 + w], half)
    # reflective symmetry about the +90 and -90 degree meridians
    assert np.array_equal(p360[:, w // 2 + w:], half[:, :w // 2 - 1:-1])
    assert np.array_equal(p360[:, :w // 2], half[:, w // 2 - 1::-1])
    # wrap continuity: the two edge columns mirror each other
    assert np.array_equal(p360[:, 0], half[:, w // 2 - 1])
    assert np.array_equal(p360[:, -1], half[:, w // 2])
    announce("mirror extension: front hemisphere bit-identical, reflective "
             "column symmetry and wrap continuity exact")


def test_metric_reference_values(announce):
    a = np.zeros((8, 8, 3))
    b = np.full((8, 8, 3), 16.0 / 255.0)
    value = psnr(a, b)
    closed_form = 20.0 * math.log10(255.0 / 16.0)
    assert abs(value - closed_form) <= 0.001

    ref = np.zeros((2, 2, 3))
    ref[0, 0] = 1.0
    nr = nrmse(ref + 0.1, ref)
    assert abs(nr - 0.100) <= 1e-6

    assert psnr(a, a) == PSNR_INF
    rng = np.random.RandomState(2)
    refimg = np.full((16, 16, 3), 0.5)
    noise = rng.randn(16, 16, 3)
    noise /= np.abs(noise).max() * 4
    vals = [psnr(refimg + amp * noise, refimg) for amp in (0.01, 0.05, 0.1)]
    assert vals[0] > vals[1] > vals[2]
    announce(f"psnr uniform-16/255 = {value:.4f} dB "
             f"(= 20*log10(255/16) +/- 0.001); nrmse uniform-0.1 = {nr:.6f} "
             f"(0.100 +/- 1e-6); psnr monotone under noise amplitude")


def test_end_to_end_self_reconstruction_batch_and_reproducibility(
        announce, tmp_path):
    pano = EquirectPanorama(smooth_pano_image(256, 512), 360.0)
    triples = {t.direction: t for t in make_pairs(pano, native=256)}
    front = triples["front"]

    def near_gen(img, stage, seed):
        return front.target_near

    def mid_gen(img, stage, seed):
        return front.target_mid

    cfg = PipelineConfig(output_height=256, mid_downscale=1,
                         fusion=FusionConfig(cg_tolerance=1e-8))
    result = run(cfg, front.input_narrow,
                 near_generator=near_gen, mid_generator=mid_gen)
    target = resize(central_half_crop(pano), 256, 256)
    reconstruction = psnr(result.pano_180.image, target)
    assert reconstruction >= 35.0

    # 10-image batch with the built-in generators at default settings
    src = tmp_path / "inputs"
    src.mkdir()
    rng = np.random.RandomState(5)
    for i in range(10):
        img = np.clip(front.input_narrow + rng.rand() * 0.005, 0, 1)
        save_png(src / f"img{i}.png", img)
    batch_cfg = PipelineConfig()
    t0 = time.perf_counter()
    summary = run_batch(batch_cfg, sorted(src.iterdir()), tmp_path / "batch")
    elapsed = time.perf_counter() - t0
    assert summary["n_ok"] == 10 and summary["n_failed"] == 0
    assert elapsed < 60.0

    # bit-reproducibility of the written panorama under a fixed seed
    first = (tmp_path / "batch" / "img0" / "pano180.png").read_bytes()
    rerun_dir = tmp_path / "rerun"
    run_batch(batch_cfg, [src / "img0.png"], rerun_dir)
    again = (rerun_dir / "img0" / "pano180.png").read_bytes()
    assert first == again
    announce(f"self-reconstruction PSNR = {reconstruction:.2f} dB (>= 35); "
             f"10-image batch in {elapsed:.1f} s (< 60); output bytes "
             f"bit-identical across reruns")
