import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "robustpulse.kernels._fast",
                ["src/robustpulse/kernels/_fast.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-python kernels are selected at import time if the extension
    # is unavailable, so a source-only install still works.
    ext_modules = []

setup(ext_modules=ext_modules)
