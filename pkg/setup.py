from setuptools import setup, Extension
from Cython.Build import cythonize

import numpy as np

# Cython module for fast Hermite design-matrix assembly
fastpoly_ext = Extension(
    "kernelcurves._fastpoly",
    ["src/kernelcurves/_fastpoly.pyx"],
    include_dirs=[np.get_include()],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(
    ext_modules=cythonize([fastpoly_ext], language_level=3),
)
