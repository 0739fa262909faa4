"""Build script for the compiled convolution kernels.

The extension is optional at runtime: teacar.nncore falls back to the
numpy kernels when the compiled module is absent (see nncore.backend).
"""

import os

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and os.environ.get("TEACAR_NO_EXT") != "1":
    ext = Extension(
        "teacar.nncore._kernels",
        sources=["src/teacar/nncore/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3", "-fopenmp", "-std=c99"],
        extra_link_args=["-fopenmp"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], language_level="3")

setup(ext_modules=ext_modules)
