"""Build script: compiles the optional C extension holding the hot kernels.

The package works without the extension (a NumPy fallback is selected at
import time), so the build degrades gracefully when no compiler or Cython
is available.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "fuzzwell._kernels",
                ["src/fuzzwell/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
