"""Build script: compiles the optional Levenshtein speedup extension.

The extension is a pure optimization. If Cython or a C compiler is
missing, the build falls back to the pure-Python kernel and the package
stays fully functional.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that downgrades compile failures to a warning."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any toolchain failure
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        import warnings

        warnings.warn(
            f"scalemine: building the C kernel failed ({exc!r}); "
            "falling back to the pure-Python implementation."
        )


def extensions():
    if os.environ.get("SCALEMINE_PURE") == "1":
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [Extension("scalemine._kernels", ["src/scalemine/_kernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
