"""Alignment and gradient-domain fusion of generated peripheral content.

The canvas holds the generated content with the original placed on top of
its footprint. Poisson blending solves, per channel and per Fill pixel,
a discrete Poisson system whose guidance gradients are the generated
content's own (Fill-interior canvas gradients); Keep pixels act as
Dirichlet data and stay bit-identical, canvas borders and Outside pixels
are natural (dropped-neighbor) boundaries. Cross-seam canvas gradients
mix the two sources and are therefore not used as guidance, which is what
lets the solve iron the seam out.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy import ndimage

from .errors import DomainError, GeometryError, SolverError
from .foveation import FoveatedLayout
from .generator import GeneratorStage
from .projection import EquirectPanorama, ViewSpec, insert_view
from .raster import validate_raster

KEEP = 0
FILL = 1
OUTSIDE = 2

_N4 = ((-1, 0), (1, 0), (0, -1), (0, 1))
_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])


@dataclass(frozen=True)
class BlendMask:
    """Per-pixel role labels for a blend: Keep / Fill / Outside."""

    labels: np.ndarray  # (H, W) uint8

    def __post_init__(self):
        lab = np.asarray(self.labels)
        if lab.ndim != 2:
            raise DomainError("labels must be a 2D array")
        if not np.isin(lab, (KEEP, FILL, OUTSIDE)).all():
            raise DomainError("labels must be KEEP, FILL or OUTSIDE")

    @classmethod
    def from_keep(cls, keep: np.ndarray) -> "BlendMask":
        """Keep where the boolean mask is set, Fill elsewhere."""
        lab = np.where(np.asarray(keep, dtype=bool), KEEP, FILL).astype(np.uint8)
        return cls(lab)

    @property
    def shape(self):
        return self.labels.shape

    def keep_mask(self) -> np.ndarray:
        return self.labels == KEEP

    def fill_mask(self) -> np.ndarray:
        return self.labels == FILL


@dataclass(frozen=True)
class FusionConfig:
    method: str = "poisson"
    cg_tolerance: float = 1e-6
    cg_max_iters: int = 0  # 0: use the 10*sqrt(n)+1000 default
    # none | jacobi | amg | auto (auto: plain CG up to ~256^2 unknowns,
    # AMG-preconditioned CG beyond; identical solutions within tolerance)
    precondition: str = "auto"

    AUTO_AMG_THRESHOLD = 70_000

    def __post_init__(self):
        if self.method not in ("overlay", "poisson"):
            raise DomainError(f"unknown fusion method {self.method!r}")
        if not (0 < self.cg_tolerance < 1):
            raise DomainError("cg_tolerance must lie in (0, 1)")
        if self.cg_max_iters < 0:
            raise DomainError("cg_max_iters must be >= 0")
        if self.precondition not in ("none", "jacobi", "amg", "auto"):
            raise DomainError(f"unknown preconditioner {self.precondition!r}")

    def preconditioner_for(self, n_unknowns: int) -> str:
        if self.precondition == "auto":
            return "amg" if n_unknowns > self.AUTO_AMG_THRESHOLD else "none"
        return self.precondition

    def max_iters_for(self, n_unknowns: int) -> int:
        if self.cg_max_iters:
            return self.cg_max_iters
        return int(10 * math.sqrt(n_unknowns)) + 1000


def align(original: np.ndarray, generated: np.ndarray, stage: GeneratorStage,
          layout: FoveatedLayout | None = None) -> tuple[np.ndarray, BlendMask]:
    """Place the original over the generated content on a shared canvas.

    NEAR: the original sits centered at native scale on the 90-degree
    plane (its footprint is the Keep region). MID: `generated` is the
    equirect-domain canvas and `original` the fused 90-degree view, which
    is inserted by projection; the insertion mask becomes Keep.
    """
    original = validate_raster(original)
    generated = validate_raster(generated)
    layout = layout or FoveatedLayout()

    if stage is GeneratorStage.NEAR:
        ch, cw = generated.shape[:2]
        oh, ow = original.shape[:2]
        if oh > ch or ow > cw:
            raise GeometryError(
                f"original {ow}x{oh} exceeds the {cw}x{ch} canvas")
        canvas = generated.copy()
        y0 = (ch - oh) // 2
        x0 = (cw - ow) // 2
        canvas[y0:y0 + oh, x0:x0 + ow] = original
        keep = np.zeros((ch, cw), dtype=bool)
        keep[y0:y0 + oh, x0:x0 + ow] = True
        return canvas, BlendMask.from_keep(keep)

    pano = EquirectPanorama(generated, 180.0)
    view = ViewSpec(yaw=0.0, pitch=0.0, fov_h=layout.near_fov, fov_v=layout.near_fov)
    written, inside = insert_view(pano, original, view)
    return written.image, BlendMask.from_keep(inside)


def _neumann_anchor_mask(labels: np.ndarray) -> np.ndarray:
    """First row-major pixel of every Fill component touching no Keep pixel.

    Those components are pure-Neumann (determined only up to a constant by
    the guidance); anchoring one pixel to the canvas makes them definite.
    """
    fill = labels == FILL
    comp, ncomp = ndimage.label(fill, structure=_CROSS)
    anchors = np.zeros_like(fill)
    if ncomp == 0:
        return anchors
    keep = labels == KEEP
    touches = np.zeros(ncomp + 1, dtype=bool)
    h, w = labels.shape
    for dy, dx in _N4:
        a = fill[max(0, dy):h + min(0, dy), max(0, dx):w + min(0, dx)]
        k = keep[max(0, -dy):h + min(0, -dy), max(0, -dx):w + min(0, -dx)]
        c = comp[max(0, dy):h + min(0, dy), max(0, dx):w + min(0, dx)]
        touches[np.unique(c[a & k])] = True
    flat = comp.ravel()
    ids, first = np.unique(flat, return_index=True)
    for cid, pos in zip(ids, first):
        if cid != 0 and not touches[cid]:
            anchors.ravel()[pos] = True
    return anchors


def _build_system(canvas: np.ndarray, labels: np.ndarray):
    """Assemble A X = B over non-anchored Fill pixels (all channels at once)."""
    h, w = labels.shape
    anchors = _neumann_anchor_mask(labels)
    unknown = (labels == FILL) & ~anchors
    fy, fx = np.nonzero(unknown)
    n = len(fy)
    index = np.full((h, w), -1, dtype=np.int64)
    index[fy, fx] = np.arange(n)

    rows = []
    cols = []
    diag = np.zeros(n)
    B = np.zeros((n, 3))
    s = canvas
    for dy, dx in _N4:
        ny = fy + dy
        nx = fx + dx
        ok = (ny >= 0) & (ny < h) & (nx >= 0) & (nx < w)
        sel = np.nonzero(ok)[0]
        qy, qx = ny[sel], nx[sel]
        qlab = labels[qy, qx]
        in_sys = qlab != OUTSIDE
        sel, qy, qx, qlab = sel[in_sys], qy[in_sys], qx[in_sys], qlab[in_sys]
        diag[sel] += 1.0

        q_anchor = anchors[qy, qx]
        q_unknown = (qlab == FILL) & ~q_anchor
        q_keep = qlab == KEEP

        u = q_unknown
        rows.append(sel[u])
        cols.append(index[qy[u], qx[u]])
        B[sel[u]] += s[fy[sel[u]], fx[sel[u]]] - s[qy[u], qx[u]]
        # Keep neighbor: Dirichlet value, no guidance across the seam
        B[sel[q_keep]] += s[qy[q_keep], qx[q_keep]]
        # anchored Fill neighbor: guidance plus Dirichlet, terms collapse to s_p
        a = q_anchor
        B[sel[a]] += s[fy[sel[a]], fx[sel[a]]]

    off_rows = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
    off_cols = np.concatenate(cols) if cols else np.empty(0, dtype=np.int64)
    A = sp.coo_matrix(
        (np.concatenate([np.full(len(off_rows), -1.0), diag]),
         (np.concatenate([off_rows, np.arange(n)]),
          np.concatenate([off_cols, np.arange(n)]))),
        shape=(n, n)).tocsr()
    return A, B, (fy, fx)


def _make_preconditioner(A, kind: str):
    if kind == "none":
        return None
    if kind == "jacobi":
        d = A.diagonal()
        d[d == 0] = 1.0
        inv = 1.0 / d
        return lambda R: R * inv[:, None]
    import pyamg

    M = pyamg.ruge_stuben_solver(A.tocsr()).aspreconditioner(cycle="V")
    return lambda R: np.column_stack([M.matvec(R[:, c]) for c in range(R.shape[1])])


def _cg(A, B, tol, max_iters, precond=None, X0=None):
    """Conjugate gradient over a block of right-hand sides (columns of B).

    Columns iterate together; once a column's residual hits zero its
    updates vanish. Relative residual is measured per column against ||b||.
    Warm-starting from the canvas values makes already-consistent systems
    (constant canvas, ground-truth content) return bit-identically.
    """
    n, k = B.shape
    if n == 0:
        return B.copy(), 0.0, 0
    X = np.zeros_like(B) if X0 is None else X0.copy()
    R = B - A @ X if X0 is not None else B.copy()
    bnorm = np.linalg.norm(B, axis=0)
    bnorm[bnorm == 0] = 1.0
    Z = precond(R) if precond else R
    P = Z.copy()
    rz = np.einsum("ij,ij->j", R, Z)
    res = np.linalg.norm(R, axis=0) / bnorm
    for it in range(max_iters):
        if np.all(res <= tol):
            return X, float(res.max()), it
        AP = A @ P
        pap = np.einsum("ij,ij->j", P, AP)
        safe = pap > 0
        alpha = np.where(safe, rz / np.where(safe, pap, 1.0), 0.0)
        X += alpha * P
        R -= alpha * AP
        Z = precond(R) if precond else R
        rz_new = np.einsum("ij,ij->j", R, Z)
        nz = rz > 0
        beta = np.where(nz, rz_new / np.where(nz, rz, 1.0), 0.0)
        P *= beta
        P += Z
        rz = rz_new
        res = np.sqrt(np.einsum("ij,ij->j", R, R)) / bnorm
    if np.any(res > tol):
        raise SolverError(
            f"conjugate gradient did not reach tol {tol} in {max_iters} "
            f"iterations (residual {float(res.max()):.3e})",
            float(res.max()), max_iters)
    return X, float(res.max()), max_iters


def poisson_blend(canvas: np.ndarray, mask: BlendMask,
                  config: FusionConfig | None = None) -> np.ndarray:
    """Solve the gradient-domain system; Keep pixels return bit-identical."""
    canvas = validate_raster(canvas)
    config = config or FusionConfig()
    labels = mask.labels
    if labels.shape != canvas.shape[:2]:
        raise DomainError("mask shape must match the canvas")
    if not (labels == FILL).any():
        return canvas.copy()

    A, B, (fy, fx) = _build_system(canvas, labels)
    n = A.shape[0]
    precond = _make_preconditioner(A, config.preconditioner_for(n)) if n else None
    X, _res, _it = _cg(A, B, config.cg_tolerance, config.max_iters_for(n),
                       precond=precond, X0=canvas[fy, fx])
    out = canvas.copy()
    out[fy, fx] = np.clip(X, 0.0, 1.0)
    return out


def overlay(canvas: np.ndarray, mask: BlendMask) -> np.ndarray:
    """The no-blend arm: the canvas already holds Keep over Fill."""
    canvas = validate_raster(canvas)
    if mask.labels.shape != canvas.shape[:2]:
        raise DomainError("mask shape must match the canvas")
    return canvas.copy()


def seam_discontinuity(img: np.ndarray, mask: BlendMask) -> float:
    """Mean absolute cross-seam difference over (Keep, Fill) neighbor pairs."""
    img = validate_raster(img)
    labels = mask.labels
    if labels.shape != img.shape[:2]:
        raise DomainError("mask shape must match the image")
    total = 0.0
    count = 0
    for axis in (0, 1):
        a = labels[:-1, :] if axis == 0 else labels[:, :-1]
        b = labels[1:, :] if axis == 0 else labels[:, 1:]
        pair = ((a == KEEP) & (b == FILL)) | ((a == FILL) & (b == KEEP))
        if pair.any():
            ia = img[:-1, :] if axis == 0 else img[:, :-1]
            ib = img[1:, :] if axis == 0 else img[:, 1:]
            diff = np.abs(ia - ib)[pair]
            total += float(diff.sum())
            count += diff.size
    if count == 0:
        raise DomainError("mask has no Keep/Fill boundary")
    return total / count


def fuse(canvas: np.ndarray, mask: BlendMask,
         config: FusionConfig | None = None) -> np.ndarray:
    """Dispatch on the configured method."""
    config = config or FusionConfig()
    if config.method == "overlay":
        return overlay(canvas, mask)
    return poisson_blend(canvas, mask, config)
