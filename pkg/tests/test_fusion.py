import numpy as np
import pytest
from scipy import ndimage

from panofov.errors import DomainError, GeometryError, SolverError
from panofov.fusion import (FILL, KEEP, OUTSIDE, BlendMask, FusionConfig,
                            align, fuse, overlay, poisson_blend,
                            seam_discontinuity)
from panofov.generator import GeneratorStage
from panofov.projection import EquirectPanorama, ViewSpec, insert_view

from conftest import smooth_pano_image

TIGHT = FusionConfig(cg_tolerance=1e-12)


def dense_blend_oracle(canvas, labels):
    """Reference solve: loop-built dense normal equations per channel."""
    h, w = labels.shape
    # pure-Neumann components: Fill components with no Keep 4-neighbor
    fill = labels == FILL
    comp, ncomp = ndimage.label(fill)
    anchors = np.zeros((h, w), dtype=bool)
    for cid in range(1, ncomp + 1):
        touches = False
        pix = np.argwhere(comp == cid)
        for y, x in pix:
            for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                ny, nx = y + dy, x + dx
                if 0 <= ny < h and 0 <= nx < w and labels[ny, nx] == KEEP:
                    touches = True
        if not touches:
            anchors[tuple(pix[0])] = True

    unknown = fill & ~anchors
    coords = [tuple(p) for p in np.argwhere(unknown)]
    idx = {p: i for i, p in enumerate(coords)}
    n = len(coords)
    out = canvas.copy()
    for c in range(canvas.shape[2]):
        A = np.zeros((n, n))
        b = np.zeros(n)
        s = canvas[..., c]
        for (y, x), i in idx.items():
            for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                ny, nx = y + dy, x + dx
                if not (0 <= ny < h and 0 <= nx < w):
                    continue
                if labels[ny, nx] == OUTSIDE:
                    continue
                A[i, i] += 1.0
                if unknown[ny, nx]:
                    A[i, idx[(ny, nx)]] -= 1.0
                    b[i] += s[y, x] - s[ny, nx]
                elif labels[ny, nx] == KEEP:
                    b[i] += s[ny, nx]
                else:  # anchored Fill pixel keeps its canvas value
                    b[i] += s[y, x]
        if n:
            sol = np.linalg.solve(A, b)
            for (y, x), i in idx.items():
                out[y, x, c] = sol[i]
    return np.clip(out, 0.0, 1.0)


def seam_fixture(step=0.3, size=16):
    canvas = np.full((size, size, 3), 0.2)
    canvas[:, size // 2:] = 0.2 + step
    keep = np.zeros((size, size), dtype=bool)
    keep[:, :size // 2] = True
    return canvas, BlendMask.from_keep(keep)


class TestAlign:
    def test_near_centered_footprint(self, rng):
        original = rng.rand(128, 128, 3)
        generated = rng.rand(256, 256, 3)
        canvas, mask = align(original, generated, GeneratorStage.NEAR)
        keep = mask.keep_mask()
        assert keep[64:192, 64:192].all() and keep.sum() == 128 * 128
        assert np.array_equal(canvas[64:192, 64:192], original)
        assert np.array_equal(canvas[~keep], generated[~keep])

    def test_near_oversize_rejected(self, rng):
        with pytest.raises(GeometryError):
            align(rng.rand(300, 300, 3), rng.rand(256, 256, 3),
                  GeneratorStage.NEAR)

    def test_mid_keep_matches_projection_mask(self, rng):
        original = rng.rand(64, 64, 3)
        generated = rng.rand(128, 128, 3)
        canvas, mask = align(original, generated, GeneratorStage.MID)
        written, inside = insert_view(EquirectPanorama(generated, 180.0),
                                      original, ViewSpec(0, 0, 90, 90))
        assert np.array_equal(mask.keep_mask(), inside)
        assert np.array_equal(canvas, written.image)


class TestBlendMask:
    def test_bad_labels_rejected(self):
        with pytest.raises(DomainError):
            BlendMask(np.full((4, 4), 7, dtype=np.uint8))

    def test_from_keep(self):
        keep = np.eye(4, dtype=bool)
        mask = BlendMask.from_keep(keep)
        assert np.array_equal(mask.keep_mask(), keep)
        assert np.array_equal(mask.fill_mask(), ~keep)


class TestPoissonBlend:
    def test_matches_dense_oracle_random_masks(self, rng):
        for _ in range(5):
            canvas = rng.rand(7, 7, 3)
            labels = rng.choice([KEEP, FILL, OUTSIDE], size=(7, 7),
                                p=[0.45, 0.45, 0.1]).astype(np.uint8)
            got = poisson_blend(canvas, BlendMask(labels), TIGHT)
            want = dense_blend_oracle(canvas, labels)
            assert np.abs(got - want).max() < 1e-8

    def test_keep_bit_identical(self, rng):
        canvas, mask = seam_fixture()
        out = poisson_blend(canvas, mask, TIGHT)
        assert np.array_equal(out[mask.keep_mask()], canvas[mask.keep_mask()])

    def test_constant_canvas_idempotent_exact(self):
        canvas = np.full((12, 12, 3), 0.37)
        keep = np.zeros((12, 12), dtype=bool)
        keep[4:8, 4:8] = True
        out = poisson_blend(canvas, BlendMask.from_keep(keep), TIGHT)
        assert np.array_equal(out, canvas)

    @pytest.mark.parametrize("step", [0.1, 0.3, 0.5])
    def test_seam_step_removed(self, step):
        canvas, mask = seam_fixture(step)
        before = seam_discontinuity(canvas, mask)
        after = seam_discontinuity(poisson_blend(canvas, mask), mask)
        assert before == pytest.approx(step)
        assert after <= 0.2 * before

    def test_fill_obeys_max_principle(self, rng):
        canvas = rng.rand(16, 16, 3)
        keep = np.zeros((16, 16), dtype=bool)
        keep[4:12, 4:12] = True
        out = poisson_blend(canvas, BlendMask.from_keep(keep), TIGHT)
        # with zero-free guidance removed the solve is still bounded by the
        # canvas range thanks to the final clip; check the analytic bound
        # for the guidance-free variant: constant Fill source
        flat = canvas.copy()
        flat[~keep] = 0.5
        out2 = poisson_blend(flat, BlendMask.from_keep(keep), TIGHT)
        assert out2.min() >= flat.min() - 1e-9
        assert out2.max() <= flat.max() + 1e-9
        assert out.min() >= 0.0 and out.max() <= 1.0

    def test_linearity_in_canvas(self, rng):
        canvas = rng.rand(10, 10, 3) * 0.5  # headroom: no clipping on either side
        keep = rng.rand(10, 10) > 0.6
        keep[0, 0] = True
        mask = BlendMask.from_keep(keep)
        a = poisson_blend(canvas, mask, TIGHT)
        b = poisson_blend(canvas * 0.5, mask, TIGHT)
        assert np.abs(a * 0.5 - b).max() < 1e-8

    def test_ground_truth_source_nearly_unchanged(self, smooth_pano):
        img = smooth_pano.image[:64, :64]
        keep = np.zeros((64, 64), dtype=bool)
        keep[16:48, 16:48] = True
        out = poisson_blend(img, BlendMask.from_keep(keep), TIGHT)
        # the seam gradients are dropped from the guidance, so the result
        # deviates from a consistent source only at the local gradient scale
        grad_scale = max(np.abs(np.diff(img, axis=0)).max(),
                         np.abs(np.diff(img, axis=1)).max())
        assert np.abs(out - img).max() <= 4 * grad_scale

    def test_pure_neumann_component_constant(self):
        # no Keep at all: one anchored pixel pins the (consistent) system
        canvas = np.full((8, 8, 3), 0.61)
        labels = np.full((8, 8), FILL, dtype=np.uint8)
        out = poisson_blend(canvas, BlendMask(labels), TIGHT)
        assert np.allclose(out, 0.61, atol=1e-10)

    def test_no_fill_returns_copy(self, rng):
        canvas = rng.rand(8, 8, 3)
        out = poisson_blend(canvas, BlendMask.from_keep(np.ones((8, 8), bool)))
        assert np.array_equal(out, canvas)
        assert out is not canvas

    def test_solver_error_on_iteration_starvation(self):
        canvas, mask = seam_fixture(0.5, size=32)
        cfg = FusionConfig(cg_tolerance=1e-12, cg_max_iters=1)
        with pytest.raises(SolverError) as err:
            poisson_blend(canvas, mask, cfg)
        assert err.value.iterations == 1
        assert err.value.residual > 0

    @pytest.mark.parametrize("kind", ["jacobi", "amg"])
    def test_preconditioners_agree_with_plain(self, rng, kind):
        canvas = rng.rand(20, 20, 3)
        keep = np.zeros((20, 20), dtype=bool)
        keep[6:14, 6:14] = True
        mask = BlendMask.from_keep(keep)
        plain = poisson_blend(canvas, mask, FusionConfig(
            cg_tolerance=1e-12, precondition="none"))
        other = poisson_blend(canvas, mask, FusionConfig(
            cg_tolerance=1e-12, precondition=kind))
        assert np.abs(plain - other).max() < 1e-8

    def test_mask_shape_mismatch(self, rng):
        with pytest.raises(DomainError):
            poisson_blend(rng.rand(8, 8, 3),
                          BlendMask.from_keep(np.ones((4, 4), bool)))


class TestOverlayAndSeam:
    def test_overlay_is_canvas_copy(self, rng):
        canvas, mask = seam_fixture()
        out = overlay(canvas, mask)
        assert np.array_equal(out, canvas)

    def test_fuse_dispatch(self):
        canvas, mask = seam_fixture()
        assert np.array_equal(fuse(canvas, mask, FusionConfig(method="overlay")),
                              canvas)
        blended = fuse(canvas, mask, FusionConfig(method="poisson"))
        assert seam_discontinuity(blended, mask) < 0.01

    def test_seam_value_on_known_fixture(self):
        canvas, mask = seam_fixture(0.25)
        assert seam_discontinuity(canvas, mask) == pytest.approx(0.25)

    def test_seam_requires_boundary(self):
        img = np.full((8, 8, 3), 0.5)
        with pytest.raises(DomainError):
            seam_discontinuity(img, BlendMask.from_keep(np.ones((8, 8), bool)))


class TestFusionConfig:
    def test_validation(self):
        with pytest.raises(DomainError):
            FusionConfig(method="feather")
        with pytest.raises(DomainError):
            FusionConfig(cg_tolerance=0.0)
        with pytest.raises(DomainError):
            FusionConfig(precondition="ilu")

    def test_auto_preconditioner_switch(self):
        cfg = FusionConfig()
        assert cfg.preconditioner_for(65_536) == "none"
        assert cfg.preconditioner_for(200_000) == "amg"

    def test_default_iteration_budget(self):
        assert FusionConfig().max_iters_for(10_000) == 2000
        assert FusionConfig(cg_max_iters=5).max_iters_for(10_000) == 5
