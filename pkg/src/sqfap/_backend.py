"""Kernel selection: the compiled extension when importable, else numpy.

Set ``SQFAP_PURE_PYTHON=1`` to force the numpy kernels.
"""

import os

from . import _fallback

if os.environ.get("SQFAP_PURE_PYTHON"):
    kernels = _fallback
    BACKEND = "python"
else:
    try:
        from . import _core as kernels

        BACKEND = "cython"
    except ImportError:  # extension not built
        kernels = _fallback
        BACKEND = "python"
