"""Numba dispatch.

Hot kernels are written twice: a loop version compiled with ``numba.njit``
and a vectorised numpy version.  Which one is used is decided once at
import time:

* ``GTRANSFER_NUMBA=0`` (or ``false``/``off``/``no``) forces the numpy path;
* otherwise the numba path is used whenever numba imports cleanly.

``use_numba()`` can be flipped at runtime by tests and the benchmark.
"""

import os

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba ships in the test image
    numba = None
    HAS_NUMBA = False


def _env_enabled():
    flag = os.environ.get("GTRANSFER_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


_state = {"numba": HAS_NUMBA and _env_enabled()}


def numba_enabled():
    return _state["numba"]


def use_numba(flag):
    """Select the numba (True) or numpy (False) kernels; returns the old value."""
    old = _state["numba"]
    if flag and not HAS_NUMBA:
        raise RuntimeError("numba is not installed")
    _state["numba"] = bool(flag)
    return old


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity otherwise."""
    kwargs.setdefault("cache", True)
    if HAS_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]):
        return args[0]
    return lambda f: f


def dispatch(jit_impl, numpy_impl):
    """Return a callable routing to ``jit_impl`` or ``numpy_impl`` per call."""

    def call(*args):
        if _state["numba"]:
            return jit_impl(*args)
        return numpy_impl(*args)

    call.jit = jit_impl
    call.numpy = numpy_impl
    call.__name__ = numpy_impl.__name__.lstrip("_").replace("_np", "")
    call.__doc__ = numpy_impl.__doc__
    return call


def max_workers():
    """Worker cap for sweep parallelism (``GTRANSFER_MAX_WORKERS``)."""
    raw = os.environ.get("GTRANSFER_MAX_WORKERS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)
