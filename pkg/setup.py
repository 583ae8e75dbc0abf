"""Build the optional compiled kernels.

Without Cython (or a C compiler) the package installs pure Python and
``reslab.specfun`` falls back to ``_pykernels`` at import.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("RESLAB_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "reslab.specfun._ckernels",
                    ["src/reslab/specfun/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
