from __future__ import annotations

import os

from setuptools import setup

ext_modules = []
if os.environ.get("GROUPSLICES_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/groupslices/_ckernels.pyx"],
            compiler_directives={"language_level": "3"},
            quiet=True,
        )
    except ImportError:
        # Cython missing: the pure-Python kernels are used instead.
        ext_modules = []

setup(ext_modules=ext_modules)
