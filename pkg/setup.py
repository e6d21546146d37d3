"""Build the optional compiled kernel extension.

Set ANITREE_SKIP_EXT=1 to install without the extension; the package then
runs on the pure NumPy fallback backend.
"""

import os

from setuptools import Extension, setup

# No -ffast-math and no FP contraction: the compiled kernels must produce
# bit-identical results to the pure backend and the scalar reference ops.
CFLAGS = ["-O3", "-ffp-contract=off", "-fopenmp"]
LDFLAGS = ["-fopenmp"]


def extensions():
    if os.environ.get("ANITREE_SKIP_EXT"):
        return []
    from Cython.Build import cythonize

    kernels = Extension(
        "anitree._kernels",
        ["src/anitree/_kernels.pyx"],
        extra_compile_args=CFLAGS,
        extra_link_args=LDFLAGS,
    )
    return cythonize(
        [kernels],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
            "nonecheck": False,
        },
    )


setup(ext_modules=extensions())
