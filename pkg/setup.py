"""Build hook for the optional compiled kernels.

The Cython extension is optional: if Cython or a C compiler is missing the
package installs without it and ``kreinres.kernels`` falls back to the numpy
implementation.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("KREINRES_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "kreinres._kernels",
                    ["src/kreinres/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
