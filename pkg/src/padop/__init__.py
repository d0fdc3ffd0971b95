"""Exact p-adic operator algebra toolkit."""

from ._backend import BACKEND
from .errors import MalformedInput, PadopError
from .linalg import ExtMatrix, PMatrix, eig_symmetric, ldu_decompose
from .padic import ZERO, ExtScalar, PadicScalar, arith, norm, nth_root, sqrt

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ZERO", "ExtMatrix", "ExtScalar", "MalformedInput", "PMatrix", "PadicScalar", "PadopError",
    "arith", "eig_symmetric", "ldu_decompose", "norm", "nth_root", "sqrt", "__version__",
]
