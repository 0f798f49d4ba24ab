"""Backend selection for the sparse polynomial kernels.

The compiled extension ``hsjet._ckernels`` is used when it was built;
otherwise the pure-Python twin is loaded.  Setting ``HSJET_PURE_PYTHON=1``
forces the fallback.
"""

import os

BACKEND = "python"

if not os.environ.get("HSJET_PURE_PYTHON"):
    try:
        from hsjet._ckernels import (  # noqa: F401
            mono_mul,
            poly_add,
            poly_addmul,
            poly_mul,
            poly_scale,
            poly_sub,
        )

        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from hsjet._pykernels import (  # noqa: F401
        mono_mul,
        poly_add,
        poly_addmul,
        poly_mul,
        poly_scale,
        poly_sub,
    )

__all__ = [
    "BACKEND",
    "mono_mul",
    "poly_add",
    "poly_addmul",
    "poly_mul",
    "poly_scale",
    "poly_sub",
]
