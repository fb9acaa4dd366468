import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; _kernels falls back to numpy
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("aitest._core", ["src/aitest/_core.pyx"],
                   include_dirs=[np.get_include()])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
