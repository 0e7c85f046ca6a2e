from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("fairmon.kernels._ext", ["src/fairmon/kernels/_ext.pyx"])],
        language_level="3",
    )
except ImportError:
    # The package works without the compiled kernels (pure-Python fallback).
    ext_modules = []

setup(ext_modules=ext_modules)
