import numpy
from setuptools import setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("panc._kernel", ["src/panc/_kernel.pyx"],
                   include_dirs=[numpy.get_include()],
                   extra_compile_args=["-O3", "-ffp-contract=off"])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
