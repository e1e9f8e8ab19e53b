"""Kernel selection: the compiled extension when importable, numpy otherwise.

Set ``RIMAUG_PURE_PYTHON=1`` before import to force the numpy path.
"""

import os

from . import _pykernels

BACKEND = "python"

if os.environ.get("RIMAUG_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

rim_forward = _impl.rim_forward
rim_forward_shared = _impl.rim_forward_shared
