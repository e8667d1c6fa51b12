"""Kernel backend selection.

The compiled Cython kernel is preferred; when the extension is missing
(source checkout without a toolchain) the pure-Python kernel takes over.
Both implement the same contract, so everything above this module is
backend-agnostic. The benchmark swaps backends to compare them.
"""

from __future__ import annotations

from contextlib import contextmanager

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_DEFAULT = "cython" if _compiled is not None else "python"
_active = _DEFAULT


def available_backends():
    return ("python",) if _compiled is None else ("cython", "python")


def active_backend():
    return _active


def set_backend(name):
    global _active
    if name not in available_backends():
        raise ValueError(f"backend {name!r} not available (have {available_backends()})")
    _active = name


@contextmanager
def use_backend(name):
    previous = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def expand_wave(indptr, nbr, ecode, disc, beta, frontier, nh, hh):
    if _active == "cython":
        return _compiled.expand_wave(indptr, nbr, ecode, disc, beta, frontier, nh, hh)
    return _kernels_py.expand_wave(indptr, nbr, ecode, disc, beta, frontier, nh, hh)
