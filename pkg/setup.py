"""Build script: compiles the optional Gibbs-sweep extension.

The package works without the extension (a pure-Python kernel is selected at
import time), so a failed compile downgrades to a warning instead of aborting
the install.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/sensortopics/_gibbs.pyx"],
        compiler_directives={"language_level": 3},
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
except Exception as exc:  # noqa: BLE001 - any build-env problem means "no extension"
    print(f"warning: building without compiled kernel ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
