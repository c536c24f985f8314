"""Hot loops of the solvers.

Two interchangeable implementations exist: ``_numba`` (compiled with
``numba.njit``) and ``_numpy`` (plain Python driving numpy). The numba path is
used unless ``KEMEDIAN_DISABLE_JIT`` is set to a non-empty value other than
``0``, or numba cannot be imported.

Both kernels work on three pair-penalty matrices indexed ``[x, y]``: the cost
of placing ``x`` ahead of, tied with, or behind ``y``.
"""

import importlib
import os

from . import _numpy

DISABLE_ENV = "KEMEDIAN_DISABLE_JIT"


def _jit_requested() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip() in ("", "0")


try:
    if not _jit_requested():
        raise ImportError("JIT disabled by environment")
    from . import _numba
except ImportError:
    _numba = None

BACKEND = "numba" if _numba is not None else "numpy"
_impl = _numba if _numba is not None else _numpy

bb_search = _impl.bb_search
quick_run = _impl.quick_run


def backend_module(name: str):
    """Return the kernel module for ``"numba"`` or ``"numpy"``."""
    if name == "numpy":
        return _numpy
    if name == "numba":
        if _numba is None:
            # the package attribute is None here, so import the submodule by name
            return importlib.import_module(f"{__name__}._numba")
        return _numba
    raise ValueError(f"unknown backend {name!r}")


__all__ = ["BACKEND", "DISABLE_ENV", "backend_module", "bb_search", "quick_run"]
