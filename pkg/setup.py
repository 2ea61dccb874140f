import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "regulus._core",
        ["src/regulus/_core.pyx"],
        include_dirs=[np.get_include(), "src/regulus"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3", "-march=native"],
    )
]

# REGULUS_NO_EXT=1 installs the pure-Python package only
setup(
    ext_modules=[] if os.environ.get("REGULUS_NO_EXT") else cythonize(
        extensions, compiler_directives={"language_level": "3"}
    ),
)
