"""Build script: compiles the optional distance-field kernels.

The package works without the extension (a pure numpy fallback is selected
at import time); building it makes the Dijkstra / horizontal-distance
kernels roughly one to two orders of magnitude faster.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "nilspec._kernels._fast",
                ["src/nilspec/_kernels/_fast.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # No Cython available: install the pure-python fallback only.
    ext_modules = []

setup(ext_modules=ext_modules)
