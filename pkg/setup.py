"""Builds the optional compiled trainer kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import time); the build therefore degrades gracefully when
Cython or a C toolchain is unavailable.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/evoloop/trainer/_kernels_cy.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
