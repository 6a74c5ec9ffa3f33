"""Build script for the optional compiled kernels.

The package is pure Python except for the hot loops of the multiphoton
module (basis enumeration and sparse off-diagonal assembly), which have a
Cython twin of the reference implementation.  If the extension fails to
build or import, the package falls back to the pure-Python kernels at
import time, so a plain `pip install .` on a box without a compiler still
yields a working install.
"""

import os

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and os.path.exists("src/fanopdc/_kernels_cy.pyx"):
    ext_modules = cythonize(
        [
            Extension(
                "fanopdc._kernels_cy",
                ["src/fanopdc/_kernels_cy.pyx"],
                language="c++",
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
