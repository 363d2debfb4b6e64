"""Build script.

The package is pure Python; optionally a Cython twin of the exact LP pivot
kernel (lossforge/_exactlp_cy.pyx) is compiled for speed.  If compilation
fails for any reason the install proceeds with the pure-Python kernel only.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/lossforge/_exactlp_cy.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    print("cython kernel skipped: %s" % exc)

setup(ext_modules=ext_modules)
