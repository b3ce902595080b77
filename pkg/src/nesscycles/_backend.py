"""Pick the compiled kernels when available, else the pure-Python ones.

Set ``NESSCYCLES_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("NESSCYCLES_PURE_PYTHON"):
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"

decompose_batch = kernels.decompose_batch
simulate_chunk = kernels.simulate_chunk
