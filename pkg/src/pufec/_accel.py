"""Numba detection and the kernel-path switch.

Hot kernels in :mod:`pufec.kernels` exist twice: a numba ``@njit`` build and
a vectorized pure-numpy build.  The numba build is used when numba imports
cleanly; setting ``PUFEC_PURE_NUMPY=1`` forces the numpy path (useful for
debugging and as a portability fallback).  ``benchmarks/bench_kernels.py``
compares the two.
"""

import os

ENV_FLAG = "PUFEC_PURE_NUMPY"


def _want_numba() -> bool:
    if os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _want_numba()

if NUMBA_ENABLED:
    from numba import njit
else:
    def njit(*args, **kwargs):
        """No-op stand-in so kernel sources import without numba."""
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap
