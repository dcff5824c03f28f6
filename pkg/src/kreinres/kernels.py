"""Backend selection for the hot kernels.

The compiled extension ``kreinres._kernels`` is used when it was built;
otherwise, or when ``KREINRES_PURE_PYTHON=1`` is set, the numpy reference
implementation is used.  ``BACKEND`` names the active one.
"""
import os

from . import _kernels_py

if os.environ.get("KREINRES_PURE_PYTHON", "") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

bessel_table = _impl.bessel_table
truncated_exp = _impl.truncated_exp
