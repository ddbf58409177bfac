from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; selfsim falls back at import
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "selfsim._kernels",
                ["src/selfsim/_kernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
