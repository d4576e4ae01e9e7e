"""Select the compiled kernels when available, else the pure-Python ones.

Set ``ONIONLEARN_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import logging
import os

from . import _pykernels

log = logging.getLogger(__name__)

EUCLIDEAN = _pykernels.EUCLIDEAN
CORRELATION = _pykernels.CORRELATION

compiled = None
if os.environ.get("ONIONLEARN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        log.debug("compiled kernels unavailable, using pure-Python fallback")

_impl = compiled if compiled is not None else _pykernels
BACKEND = "cython" if compiled is not None else "python"

hull_indices = _impl.hull_indices
peel_layers = _impl.peel_layers
shift_distances = _impl.shift_distances


def backends():
    """Mapping of backend name to kernel module for every importable backend."""
    out = {"python": _pykernels}
    if compiled is not None:
        out["cython"] = compiled
    return out
