"""Numba availability plumbing.

Hot kernels in :mod:`tricentre._kernels` are compiled with ``numba.njit``
when possible.  Setting ``TRICENTRE_NUMBA=0`` in the environment forces the
pure-Python/numpy fallback path (useful for debugging and as the reference
side of ``python -m tricentre.bench``); the fallback is also selected
automatically when numba is not importable.
"""
import os

_flag = os.environ.get("TRICENTRE_NUMBA", "1").strip().lower()
_want_numba = _flag not in ("0", "false", "no", "off")

NUMBA_ENABLED = False
if _want_numba:
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - depends on environment
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    def maybe_jit(func):
        return _njit(cache=True)(func)
else:
    def maybe_jit(func):
        return func
