"""Build script: compiles the pair-sampling kernel if Cython is available.

The package works without the extension (a numpy fallback is selected at
import time), so a failed extension build only costs speed.
"""

import sys

from setuptools import Extension, setup


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        print("Cython/numpy unavailable at build time; "
              "skipping compiled kernel", file=sys.stderr)
        return []
    ext = Extension(
        "graphex._kernel_c",
        sources=["src/graphex/_kernel_c.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions())
