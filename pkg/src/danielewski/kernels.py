"""Backend selection for the arithmetic kernels.

The compiled extension is used when it was built and ``DANIELEWSKI_NO_EXT``
is unset; otherwise the pure-Python module is imported.  Both expose the
same functions.
"""

import os

from danielewski._pykernels import ExponentOverflow

if os.environ.get("DANIELEWSKI_NO_EXT"):
    from danielewski import _pykernels as _impl
    BACKEND = "python"
else:
    try:
        from danielewski import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        from danielewski import _pykernels as _impl
        BACKEND = "python"

mul_terms = _impl.mul_terms
reduce_vector = _impl.reduce_vector

__all__ = ["BACKEND", "ExponentOverflow", "mul_terms", "reduce_vector"]
