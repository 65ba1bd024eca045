import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

# -ffp-contract=off keeps the compiled stencil bit-identical to the NumPy fallback
# (no FMA contraction of a*b+c).
extensions = [
    Extension(
        "gpme1d._kernels._core",
        ["src/gpme1d/_kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
