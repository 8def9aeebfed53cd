import os

from setuptools import Extension, setup

# The compiled kernels are optional: without a C toolchain (or with
# LSALLOC_PURE_ONLY=1) the package installs pure-Python only and
# lsalloc._kernels falls back at import time.
ext_modules = []
if os.environ.get("LSALLOC_PURE_ONLY") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "lsalloc._speedups",
                    ["src/lsalloc/_speedups.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
