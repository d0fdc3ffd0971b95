"""Build hook for the optional compiled kernels.

The package works without the extension; when Cython (or a C compiler) is
missing the pure-Python kernels are used instead.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("padop._ckernels", ["src/padop/_ckernels.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
