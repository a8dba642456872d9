import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SUMHORN_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("sumhorn.semantics._kernels", ["src/sumhorn/semantics/_kernels.pyx"])],
            compiler_directives={"language_level": "3"},
            quiet=True,
        )
        for ext in ext_modules:
            ext.include_dirs.append(numpy.get_include())
            ext.extra_compile_args.append("-O2")
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
