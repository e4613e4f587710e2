"""Build script: compiles the optional accelerated kernels.

The package is fully functional without the compiled extension; if Cython or a
C toolchain is unavailable, or compilation fails for any reason, installation
proceeds with the pure-Python kernels.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible; fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"WARNING: building the accelerated kernels failed ({exc!r}); "
            "falling back to the pure-Python kernels.",
            file=sys.stderr,
        )


def make_extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print(
            "WARNING: Cython not available; installing with pure-Python kernels.",
            file=sys.stderr,
        )
        return []
    ext = Extension(
        "adicweights._kernels",
        sources=["src/adicweights/_kernels.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=make_extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
