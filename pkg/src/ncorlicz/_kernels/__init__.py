"""Hot-kernel backend selection.

Prefers the compiled extension (`._core`, built from `_core.pyx`) and falls
back to the pure-numpy implementation. `BACKEND` names the active one;
set NCORLICZ_PURE_PYTHON=1 to force the fallback.
"""

import os

from . import pyfallback
from .pyfallback import KIND_LOGPOWER, KIND_POWER, KIND_TABLE, bisect_scale

if os.environ.get("NCORLICZ_PURE_PYTHON"):
    _impl = pyfallback
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pyfallback

BACKEND = _impl.BACKEND
phi_many = _impl.phi_many
modular_sum = _impl.modular_sum
luxemburg_bisect = _impl.luxemburg_bisect

__all__ = [
    "BACKEND",
    "KIND_POWER",
    "KIND_LOGPOWER",
    "KIND_TABLE",
    "phi_many",
    "modular_sum",
    "luxemburg_bisect",
    "bisect_scale",
    "pyfallback",
]
