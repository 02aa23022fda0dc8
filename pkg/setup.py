"""Build script.  The compiled stepping kernel is optional: set
NCFORMS_NO_EXT=1 (or lack a C toolchain) and the package installs as pure
Python, falling back to the numpy implementation at import time."""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("NCFORMS_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "ncforms._ctoda",
                    ["src/ncforms/_ctoda.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
