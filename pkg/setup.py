"""Builds the compiled selection kernels.

The extension is optional at runtime: when it fails to build or import, the
package falls back to the NumPy kernels. Keep the flags free of -ffast-math
and -march=native; the kernels rely on strict IEEE evaluation order to stay
bit-identical to the fallback.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "reldiv._kernels._ckernels",
                ["src/reldiv/_kernels/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
        },
    )

setup(ext_modules=ext_modules)
