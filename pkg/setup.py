"""Build script: compiles the optional Cython kernel extension.

The extension is a pure speed-up; if Cython or a C compiler is missing the
build degrades to the vectorized numpy kernels selected at import time by
``blindrx._kernels``.
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            warnings.warn(f"native kernel build skipped ({exc}); "
                          "falling back to numpy kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"native kernel build failed ({exc}); "
                          "falling back to numpy kernels")


def make_extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools.extension import Extension
    except ImportError as exc:
        warnings.warn(f"native kernels not built ({exc})")
        return []
    ext = Extension(
        "blindrx._kernels._native",
        ["src/blindrx/_kernels/_native.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=make_extensions(), cmdclass={"build_ext": OptionalBuildExt})
