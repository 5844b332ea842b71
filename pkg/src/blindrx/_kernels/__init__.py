"""Kernel backend selection.

The compiled extension (``_native``, built from Cython at install time) is
preferred; the numpy fallback is used when the build was skipped or when
the environment variable ``BLINDRX_FORCE_PYTHON`` is set to a non-empty
value.  Both backends expose identical ``bp_decode`` and ``equalize``
functions (contracts documented in ``_numpy``).
"""

import os

from . import _numpy as _numpy_backend

BACKEND = "numpy"
_impl = _numpy_backend

if not os.environ.get("BLINDRX_FORCE_PYTHON"):
    try:
        from . import _native as _native_backend
    except ImportError:
        pass
    else:
        BACKEND = "native"
        _impl = _native_backend

LLR_CLAMP = _numpy_backend.LLR_CLAMP
bp_decode = _impl.bp_decode
equalize = _impl.equalize

__all__ = ["BACKEND", "LLR_CLAMP", "bp_decode", "equalize"]
