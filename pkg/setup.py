"""Build script: compiles the optional round-loop kernel.

The package works without the extension (a pure-Python engine is selected at
import time); the build therefore tolerates a missing compiler or Cython.
"""

import os

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    if not os.path.exists("src/icoqkd/protocol/_roundloop.pyx"):
        raise ImportError("kernel source missing")
    ext_modules = cythonize(
        [
            Extension(
                "icoqkd.protocol._roundloop",
                ["src/icoqkd/protocol/_roundloop.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
