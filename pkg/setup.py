import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; kappanorm._pykernels is used
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "kappanorm._ckernels",
                ["src/kappanorm/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
