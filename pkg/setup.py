"""Build script: compiles the Cython propagation kernel when possible.

The package is fully functional without the extension (a pure-Python
path with identical semantics is selected at import); set
``QBCHARGE_NO_EXT=1`` to skip the build deliberately.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the kernel if we can; fall back to pure Python if not."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, broken toolchain, ...
            print(f"warning: compiled kernel skipped ({exc}); "
                  "using the pure-Python propagation path", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); "
                  "using the pure-Python propagation path", file=sys.stderr)


ext_modules = []
cmdclass = {}
if not os.environ.get("QBCHARGE_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("qbcharge._kernel", ["src/qbcharge/_kernel.pyx"],
                       extra_compile_args=["-O3"])],
            language_level=3,
        )
        cmdclass["build_ext"] = OptionalBuildExt
    except ImportError:
        print("warning: Cython not available; "
              "using the pure-Python propagation path", file=sys.stderr)

setup(ext_modules=ext_modules, cmdclass=cmdclass)
