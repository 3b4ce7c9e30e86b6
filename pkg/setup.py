"""Build the optional compiled kernels; the package works without them."""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or broken
            print(f"warning: compiled kernels not built ({exc}); using the pure-Python backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: {ext.name} not built ({exc}); using the pure-Python backend")


ext_modules = []
if not os.environ.get("HALLPLANES_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "hallplanes._ckernels",
                    ["src/hallplanes/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # Cython missing or .pyx fails to translate
        print(f"warning: compiled kernels skipped ({exc})")
        ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
