"""Kernel selection: compiled Cython core when available, numpy fallback otherwise.

``RADIUSLAB_JACOBI=python`` or ``=compiled`` forces a backend; the default is
the compiled one when importable. Both expose ``jacobi_inplace`` with the same
contract, so everything above this module is backend-agnostic.
"""

import os

from . import _jacobi_py

_FORCE = os.environ.get("RADIUSLAB_JACOBI", "").strip().lower()

_compiled = None
if _FORCE != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None
        if _FORCE == "compiled":
            raise ImportError(
                "RADIUSLAB_JACOBI=compiled but radiuslab._kernels is not built; "
                "run `pip install -e . --no-build-isolation`"
            )

_active = _compiled if _compiled is not None else _jacobi_py

jacobi_inplace = _active.jacobi_inplace
jacobi_batch = _active.jacobi_batch
radius_h_values = _active.radius_h_values


def active_backend():
    """Name of the kernel in use: 'cython' or 'python'."""
    return _active.KERNEL_NAME


def available_backends():
    out = {"python": _jacobi_py}
    if _compiled is not None:
        out["cython"] = _compiled
    return out
