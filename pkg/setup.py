"""Build script. The Cython kernel is optional: without a working toolchain the
package falls back to the pure-Python kernel at import time."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "hinquery._kernels",
                ["src/hinquery/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
