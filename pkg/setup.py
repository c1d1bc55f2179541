"""Optional compiled-kernel build.

The package is fully functional without the extension; `coendo._kernels`
falls back to the pure-Python implementation at import time.  Build the
fast kernels in place with

    python setup.py build_ext --inplace
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/coendo/_kernels/_fast.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass


class _OptionalBuildExt:
    pass


if ext_modules:
    from setuptools.command.build_ext import build_ext

    class optional_build_ext(build_ext):  # noqa: N801
        """Never fail the install because the compiler is unavailable."""

        def run(self):
            try:
                super().run()
            except Exception as exc:  # pragma: no cover
                print(f"warning: compiled kernels skipped ({exc})")

        def build_extension(self, ext):
            try:
                super().build_extension(ext)
            except Exception as exc:  # pragma: no cover
                print(f"warning: {ext.name} skipped ({exc})")

    setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
else:
    setup()
