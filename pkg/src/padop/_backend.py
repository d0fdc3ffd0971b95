"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it has been built; otherwise
(or when ``PADOP_BACKEND=python``) the pure-Python ``_pykernels`` module is
used. Both expose the same functions with identical results.
"""

import os
from functools import lru_cache

from . import _pykernels

MAX_PREC = 1024

if os.environ.get("PADOP_BACKEND", "").lower() == "python":
    kernels = _pykernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:  # extension not built
        kernels = _pykernels

BACKEND = "python" if kernels is _pykernels else "cython"
EXACT = _pykernels.EXACT
ZERO_RAW = _pykernels.ZERO


def load_backend(name: str):
    """Return the kernel module for ``name`` (``"python"`` or ``"cython"``)."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


@lru_cache(maxsize=None)
def powers(p: int) -> list:
    """Table ``[p**0, ..., p**MAX_PREC]``."""
    out = [1]
    for _ in range(MAX_PREC):
        out.append(out[-1] * p)
    return out
