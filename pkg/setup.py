import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "cylsrt._kernels",
    ["src/cylsrt/_kernels.pyx"],
    include_dirs=[numpy.get_include()],
    extra_compile_args=["-O3", "-fopenmp"],
    extra_link_args=["-fopenmp"],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)
# The package falls back to the pure-numpy kernels when the extension is
# missing, so a failed compile must not abort the install.
ext.optional = True

setup(ext_modules=cythonize([ext], language_level=3))
