from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "mdlink._ckernels",
                ["src/mdlink/_ckernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
else:
    # Pure-Python install; the numpy kernel fallback is selected at import.
    ext_modules = []

setup(ext_modules=ext_modules)
