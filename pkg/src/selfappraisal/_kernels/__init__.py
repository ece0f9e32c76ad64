"""Hot-loop kernels with a compiled backend and a pure-Python fallback.

The compiled extension is used when importable; setting
``SELFAPPRAISAL_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _rk4_py

BACKEND = "python"
rk4_segment = _rk4_py.rk4_segment

if os.environ.get("SELFAPPRAISAL_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _rk4
    except ImportError:
        pass
    else:
        rk4_segment = _rk4.rk4_segment
        BACKEND = "cython"

python_rk4_segment = _rk4_py.rk4_segment

__all__ = ["BACKEND", "rk4_segment", "python_rk4_segment"]
