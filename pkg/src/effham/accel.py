"""Backend selection for the hot stencil kernels.

Both kernel sets are always importable; ``EFFHAM_BACKEND`` only picks the
default.  ``EFFHAM_BACKEND=numpy`` forces the vectorised numpy path and
``numba`` (or unset) the compiled one; anything else is an error.
"""

import os

import numba

numba_default = {
    "nogil": True,
    "cache": True,
    "fastmath": False,
    "boundscheck": False,
}

BACKENDS = ("numba", "numpy")


def njit(func=None, **overrides):
    opts = {**numba_default, **overrides}
    if func is None:
        return lambda f: numba.njit(**opts)(f)
    return numba.njit(**opts)(func)


def default_backend():
    name = os.environ.get("EFFHAM_BACKEND", "numba").strip().lower() or "numba"
    if name not in BACKENDS:
        raise ValueError(f"EFFHAM_BACKEND must be one of {BACKENDS}, got {name!r}")
    return name


def thread_count():
    """Worker cap from ``EFFHAM_THREADS`` (default 1); never changes results."""
    raw = os.environ.get("EFFHAM_THREADS")
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"EFFHAM_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)
