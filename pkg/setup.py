"""Build script for the optional compiled diff kernel.

The package works without the extension: linefix.linediff falls back to the
pure-Python kernel when the compiled module is missing.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "linefix._myers",
                ["src/linefix/_myers.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
