# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython backend for the patch correspondence search (hot inner loops)."""
import numpy as np

cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()


cdef inline double _dist(double[:, :, ::1] img, int ty, int tx, int sy, int sx,
                         int ph, int h, int w) nogil:
    cdef int a = -ph if ty >= ph else -ty
    cdef int b = ph if ty + ph <= h - 1 else h - 1 - ty
    cdef int c = -ph if tx >= ph else -tx
    cdef int d = ph if tx + ph <= w - 1 else w - 1 - tx
    cdef int dy, dx, ch
    cdef double acc = 0.0, diff
    for dy in range(a, b + 1):
        for dx in range(c, d + 1):
            for ch in range(3):
                diff = img[ty + dy, tx + dx, ch] - img[sy + dy, sx + dx, ch]
                acc += diff * diff
    return acc / ((b - a + 1) * (d - c + 1))


def patch_dists(double[:, :, ::1] img, int[:, ::1] targets, int[:, ::1] nnf,
                int patch_half):
    cdef int h = img.shape[0]
    cdef int w = img.shape[1]
    cdef int n = targets.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef int i
    for i in range(n):
        ov[i] = _dist(img, targets[i, 0], targets[i, 1], nnf[i, 0], nnf[i, 1],
                      patch_half, h, w)
    return out


def propagate_search(double[:, :, ::1] img, int[:, ::1] targets,
                     int[:, ::1] tindex, cnp.uint8_t[:, ::1] src_valid,
                     int[:, ::1] nnf, double[::1] best_d, int patch_half,
                     double[:, :, ::1] rand01, double[::1] radii,
                     bbox, int search_region, bint reverse):
    cdef int h = img.shape[0]
    cdef int w = img.shape[1]
    cdef int y0b = bbox[0], y1b = bbox[1], x0b = bbox[2], x1b = bbox[3]
    cdef int n = targets.shape[0]
    cdef int nr = radii.shape[0]
    cdef int i, idx, ty, tx, by, bx, ny, nx, cy, cx, j, k, t, dy, dx
    cdef int step = 1 if reverse else -1
    cdef int lo_y, hi_y, lo_x, hi_x
    cdef double bd, d

    for idx in range(n):
        i = n - 1 - idx if reverse else idx
        ty = targets[i, 0]
        tx = targets[i, 1]
        by = nnf[i, 0]
        bx = nnf[i, 1]
        bd = best_d[i]

        for t in range(2):
            if t == 0:
                dy = 0; dx = step
            else:
                dy = step; dx = 0
            ny = ty + dy
            nx = tx + dx
            if 0 <= ny < h and 0 <= nx < w and tindex[ny, nx] >= 0:
                j = tindex[ny, nx]
                cy = nnf[j, 0] - dy
                cx = nnf[j, 1] - dx
                if y0b <= cy <= y1b and x0b <= cx <= x1b and src_valid[cy, cx]:
                    d = _dist(img, ty, tx, cy, cx, patch_half, h, w)
                    if d < bd:
                        bd = d; by = cy; bx = cx

        lo_y = y0b; hi_y = y1b; lo_x = x0b; hi_x = x1b
        if search_region > 0:
            if ty - search_region > lo_y: lo_y = ty - search_region
            if ty + search_region < hi_y: hi_y = ty + search_region
            if tx - search_region > lo_x: lo_x = tx - search_region
            if tx + search_region < hi_x: hi_x = tx + search_region
        for k in range(nr):
            cy = by + <int>floor(radii[k] * (2.0 * rand01[i, k, 0] - 1.0) + 0.5)
            cx = bx + <int>floor(radii[k] * (2.0 * rand01[i, k, 1] - 1.0) + 0.5)
            if cy < lo_y: cy = lo_y
            if cy > hi_y: cy = hi_y
            if cx < lo_x: cx = lo_x
            if cx > hi_x: cx = hi_x
            if (cy != by or cx != bx) and src_valid[cy, cx]:
                d = _dist(img, ty, tx, cy, cx, patch_half, h, w)
                if d < bd:
                    bd = d; by = cy; bx = cx

        nnf[i, 0] = by
        nnf[i, 1] = bx
        best_d[i] = bd


def vote(double[:, :, ::1] img, int[:, ::1] targets, int[:, ::1] nnf,
         cnp.uint8_t[:, ::1] unknown, int patch_half):
    cdef int h = img.shape[0]
    cdef int w = img.shape[1]
    cdef int n = targets.shape[0]
    cdef cnp.ndarray[double, ndim=3] sums = np.zeros((h, w, 3), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] counts = np.zeros((h, w), dtype=np.float64)
    cdef double[:, :, ::1] sv = sums
    cdef double[:, ::1] cv = counts
    cdef int i, ty, tx, sy, sx, a, b, c, d, dy, dx, ch
    for i in range(n):
        ty = targets[i, 0]; tx = targets[i, 1]
        sy = nnf[i, 0]; sx = nnf[i, 1]
        a = -patch_half if ty >= patch_half else -ty
        b = patch_half if ty + patch_half <= h - 1 else h - 1 - ty
        c = -patch_half if tx >= patch_half else -tx
        d = patch_half if tx + patch_half <= w - 1 else w - 1 - tx
        for dy in range(a, b + 1):
            for dx in range(c, d + 1):
                if unknown[ty + dy, tx + dx]:
                    for ch in range(3):
                        sv[ty + dy, tx + dx, ch] += img[sy + dy, sx + dx, ch]
                    cv[ty + dy, tx + dx] += 1.0
    return sums, counts
