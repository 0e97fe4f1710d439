"""Kernel backend selection.

The compiled Cython kernel is used when its extension module imported
successfully; otherwise the pure-numpy twin takes over.  Set the
environment variable ``EOREADOUT_BACKEND`` to ``python`` or ``compiled``
before import to force a backend (``compiled`` raises if the extension
is unavailable); the default is ``auto``.
"""

import os

from ._rk4_py import rk4_run as rk4_run_python

try:
    from ._rk4_cy import rk4_run as rk4_run_compiled
    COMPILED_AVAILABLE = True
except ImportError:
    rk4_run_compiled = None
    COMPILED_AVAILABLE = False

_requested = os.environ.get("EOREADOUT_BACKEND", "auto").lower()
if _requested not in ("auto", "python", "compiled"):
    raise RuntimeError(f"EOREADOUT_BACKEND={_requested!r} not recognized "
                       "(use auto, python, or compiled)")
if _requested == "compiled" and not COMPILED_AVAILABLE:
    raise RuntimeError("EOREADOUT_BACKEND=compiled but the extension module "
                       "is not built; run `python setup.py build_ext --inplace`")

if _requested == "python" or not COMPILED_AVAILABLE:
    BACKEND = "python"
    rk4_run = rk4_run_python
else:
    BACKEND = "compiled"
    rk4_run = rk4_run_compiled

__all__ = ["rk4_run", "rk4_run_python", "rk4_run_compiled",
           "BACKEND", "COMPILED_AVAILABLE"]
