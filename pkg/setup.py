from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "heisgeo._kernels_cy",
                ["src/heisgeo/_kernels_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython/numpy at build time: install the pure-Python package only.
    # heisgeo.kernels falls back to the numpy backend at import.
    ext_modules = []

setup(ext_modules=ext_modules)
