"""Build script: compiles the optional fast entropy/mutual-information kernels.

The package works without the extension (a numpy fallback is selected at
import time), so a failed Cython build only costs speed.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/isacrelay/_fastmi.pyx",
        compiler_directives={"language_level": "3"},
    )
    include_dirs = [numpy.get_include()]
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"warning: skipping fast kernels ({exc}); pure-numpy backend will be used")
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
