"""Build the optional compiled kernels; the package still works without them."""

from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "springcool._kernels",
        ["src/springcool/_kernels.pyx"],
        extra_compile_args=["-O3"],
        optional=True,
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
