"""Hot-loop kernels for randomized patch correspondence search.

A compiled Cython backend is preferred; a pure NumPy/Python backend with
identical semantics is selected when the extension is unavailable. Set
PANOFOV_PURE_PYTHON=1 to force the fallback (used by the benchmark).
"""
import os

if os.environ.get("PANOFOV_PURE_PYTHON"):
    from . import _patch_py as backend
    HAVE_COMPILED = False
else:
    try:
        from . import _patch_cy as backend  # type: ignore[attr-defined]
        HAVE_COMPILED = True
    except ImportError:
        from . import _patch_py as backend
        HAVE_COMPILED = False

patch_dists = backend.patch_dists
propagate_search = backend.propagate_search
vote = backend.vote

BACKEND_NAME = "cython" if HAVE_COMPILED else "python"
