"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time), so any failure here downgrades
to a source-only install instead of aborting.
"""

from setuptools import Extension, setup


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "galres._gal_cy",
        sources=["src/galres/_gal_cy.pyx"],
        # no -ffast-math: compensated summation relies on strict IEEE ordering
        extra_compile_args=["-O2"],
    )
    return cythonize([ext], language_level="3")


setup(ext_modules=_extensions())
