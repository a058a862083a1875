"""Build the optional compiled search kernels.

The package works without them: ``transversal.kernels`` falls back to the
pure-Python implementation when the extension is missing.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:  # pure-Python install
        return []
    try:
        exts = cythonize(
            [Extension("transversal._kernels", ["src/transversal/_kernels.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # noqa: BLE001
        print(f"warning: cythonize failed ({exc}); using pure-Python fallback")
        return []
    for ext in exts:
        ext.extra_compile_args = ["-O3"]
    return exts


ext_modules = _extensions()


class OptionalBuildExt(build_ext):
    """Skip the extension instead of failing the install when no compiler works."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: compiled kernels not built ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: {ext.name} not built ({exc}); using pure-Python fallback")


setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
