import os

from setuptools import Extension, setup

# GSEXTRACT_NO_EXT=1 installs the pure-Python build only.
ext_modules = []
if not os.environ.get("GSEXTRACT_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "gsextract._gf2",
                    ["src/gsextract/_gf2.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )

setup(ext_modules=ext_modules)
