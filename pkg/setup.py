"""Build the optional compiled Jacobi kernel.

The package works without it (a pure numpy fallback is selected at import
time), so any failure here degrades to a source-only install instead of
aborting.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = [
        Extension(
            "radiuslab._kernels",
            sources=["src/radiuslab/_kernels.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            # -ffp-contract=off: keep rotation arithmetic bit-stable (no FMA
            # contraction). -fcx-limited-range: inline complex multiplies
            # (identical results on finite values; inputs are validated
            # finite upstream).
            extra_compile_args=["-O2", "-ffp-contract=off", "-fcx-limited-range"],
        )
    ]
    ext_modules = cythonize(
        extensions,
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(
        "radiuslab: compiled kernel unavailable (%s); "
        "installing with the pure-python backend only\n" % exc
    )

setup(ext_modules=ext_modules)
