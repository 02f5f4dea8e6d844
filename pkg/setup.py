from setuptools import Extension, setup

# The compiled pitch kernel is optional: the package falls back to the
# pure-numpy implementation in emodesk.kernels when the extension is absent.
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "emodesk.kernels._accel",
                ["src/emodesk/kernels/_accel.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
