import os

from setuptools import Extension, setup

# The compiled kernel is an optional speedup; henongreen.kernels falls back
# to the pure-Python engine when the extension is absent.
ext_modules = []
if not os.environ.get("HENONGREEN_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext = Extension(
            "henongreen._fastkernel",
            ["src/henongreen/_fastkernel.pyx"],
            # -ffp-contract=off keeps the double arithmetic identical to the
            # pure-Python engine (no FMA contraction), so both engines produce
            # bit-equal grids.
            extra_compile_args=["-O3", "-ffp-contract=off"],
            optional=True,
        )
        ext_modules = cythonize(
            [ext],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )

setup(ext_modules=ext_modules)
