import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "wigmore._kernels_cy",
                ["src/wigmore/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    # The package still works without the compiled kernel; the pure-Python
    # fallback is selected at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
