"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy implementation in ``_kernels_py``. Set COVPAIR_PURE_PYTHON=1 to force
the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
kernels = _kernels_py

if not os.environ.get("COVPAIR_PURE_PYTHON"):
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        kernels = _ckernels
        BACKEND = "cython"

bessel_k = kernels.bessel_k
log_kv_scaled = kernels.log_kv_scaled
density = kernels.density
