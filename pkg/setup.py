"""Build script: compiles the optional Cython stepping kernels.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so the extension is marked optional and any build
failure is tolerated.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "gravmix._ckernels",
        sources=["src/gravmix/_ckernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    ext_modules = cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
    for e in ext_modules:
        e.optional = True
except ImportError:
    # No Cython/NumPy at build time: install the pure-Python package.
    ext_modules = []

setup(ext_modules=ext_modules)
