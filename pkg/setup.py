"""Build script for the optional compiled kernel core.

The package is pure Python plus one Cython extension holding the hot
Monte-Carlo rate kernels. If Cython or a C compiler is unavailable the
extension is skipped and the package falls back to the numpy kernels at
import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "mimosel._kernels._core",
                ["src/mimosel/_kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
