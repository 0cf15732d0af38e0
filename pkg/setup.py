import os

from setuptools import setup

ext_modules = []
if os.getenv("DYNMATCH_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "dynmatch._ckernels",
                    ["src/dynmatch/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        # pure-Python fallback kernels are used at import time
        ext_modules = []

setup(ext_modules=ext_modules)
