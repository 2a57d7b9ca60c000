"""Build the optional compiled Gibbs-sampling kernel.

The package works without it (a pure-Python kernel is selected at import
time); set RETTA_SKIP_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RETTA_SKIP_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "retta._gibbs",
                    ["src/retta/_gibbs.pyx"],
                    include_dirs=[numpy.get_include()],
                    # -ffp-contract=off keeps float arithmetic bit-identical
                    # to the pure-Python kernel (no FMA fusion).
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
