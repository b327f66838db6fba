"""Build script: compiles the optional Viterbi extension when Cython and a
C compiler are available.  The package works without it (pure-Python kernel
is selected at import time), so any build failure here downgrades to a
plain install instead of aborting."""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext = Extension(
        "chunktagger._viterbi",
        ["src/chunktagger/_viterbi.pyx"],
        extra_compile_args=["-O3"],
    )
    ext_modules = cythonize(
        [ext],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print("chunktagger: skipping compiled kernel (%s)" % exc)

setup(ext_modules=ext_modules)
