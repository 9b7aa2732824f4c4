import os

import numpy
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("HASHINFER_SKIP_EXT", "") not in ("1", "true"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "hashinfer.kernels._fastpath",
                ["src/hashinfer/kernels/_fastpath.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
