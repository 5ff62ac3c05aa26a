"""numba shim: ``TTPNR_DISABLE_NUMBA=1`` (or numba missing) turns ``njit`` into a no-op."""

from __future__ import annotations

import os

_FLAG = os.environ.get("TTPNR_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED_BY_ENV = _FLAG in {"1", "true", "yes", "on"}

try:
    if NUMBA_DISABLED_BY_ENV:
        raise ImportError("disabled by TTPNR_DISABLE_NUMBA")
    from numba import njit, objmode

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn

    class objmode:  # noqa: N801 - mirrors numba.objmode
        def __init__(self, **types):
            pass

        def __enter__(self):
            return self

        def __exit__(self, *exc):
            return False
