"""Build script: compiles the optional Cython filter kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile only costs speed. `pip install -e .
--no-build-isolation` with Cython available builds the fast path.
"""
import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "dephasekit._kernels._filter_cy",
                ["src/dephasekit/_kernels/_filter_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(f"dephasekit: building without compiled kernel ({exc})\n")

setup(ext_modules=ext_modules)
