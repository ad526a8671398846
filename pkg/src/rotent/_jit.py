"""JIT switch for the numeric kernels.

Set ``ROTENT_DISABLE_JIT=1`` to run every kernel as plain Python on numpy
arrays. The flag is read once, at import time.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

JIT_DISABLED = os.environ.get("ROTENT_DISABLE_JIT", "").strip() not in ("", "0")
JIT_ENABLED = numba is not None and not JIT_DISABLED


def kernel(fn):
    """Compile ``fn`` with ``numba.njit`` unless the fallback path is selected.

    The original function stays reachable as ``fn.py_func`` in both modes so
    benchmarks can time the two paths side by side.
    """
    if not JIT_ENABLED:
        fn.py_func = fn
        return fn
    return numba.njit(cache=True)(fn)
