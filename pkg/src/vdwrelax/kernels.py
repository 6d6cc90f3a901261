"""Kernel backend selection.

The compiled extension is preferred; the numpy implementation is used when
it is missing or when ``VDWRELAX_PURE_PYTHON`` is set to a non-empty value
other than ``0``.
"""

import logging
import os

from . import _kernels_py

log = logging.getLogger(__name__)

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_FORCE_PYTHON = os.environ.get("VDWRELAX_PURE_PYTHON", "") not in ("", "0")

_active = _kernels_py if (_FORCE_PYTHON or _compiled is None) else _compiled
if _compiled is None:
    log.debug("compiled kernels unavailable, using numpy fallback")


def available_backends():
    names = [_kernels_py.NAME]
    if _compiled is not None:
        names.insert(0, _compiled.NAME)
    return names


def get_backend(name=None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return _active
    if name == _kernels_py.NAME:
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")


def set_backend(name):
    """Switch the process-wide backend; returns the previous backend name."""
    global _active
    previous = _active.NAME
    _active = get_backend(name)
    return previous


def backend_name():
    return _active.NAME
