"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``SUMHORN_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("SUMHORN_PURE_PYTHON") == "1":
    from . import _kernels_py as impl
else:
    try:
        from . import _kernels as impl
    except ImportError:
        from . import _kernels_py as impl

BACKEND = "python" if impl.__name__.endswith("_py") else "cython"

loop_outcomes = impl.loop_outcomes
closure = impl.closure
r_star = impl.r_star
sweep = impl.sweep
SWEEP_KEYS = impl.SWEEP_KEYS
