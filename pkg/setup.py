"""Build script: compiles the optional RK4 extension module.

The package is fully functional without the extension (a pure-numpy
fallback is selected at import time); the build therefore tolerates a
missing compiler or missing Cython and falls back to a pure-Python
install.
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that degrades to a pure-Python install on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            warnings.warn(f"C extension build skipped ({exc}); "
                          "falling back to the pure-Python kernel")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"building {ext.name} failed ({exc}); "
                          "falling back to the pure-Python kernel")


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError as exc:
        warnings.warn(f"Cython/numpy unavailable ({exc}); "
                      "installing without the compiled kernel")
        return []
    return cythonize(
        [
            Extension(
                "eoreadout._kernels._rk4_cy",
                ["src/eoreadout/_kernels/_rk4_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
