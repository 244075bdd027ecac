"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``HCBF_PURE_PYTHON`` is set to a non-empty value, the
pure-Python module is used.  ``BACKEND`` names the active one.
"""
import os

if os.environ.get("HCBF_PURE_PYTHON"):
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _kernels_py as _impl
        BACKEND = "python"

solve_qp = _impl.solve_qp
eval_theta = _impl.eval_theta
scan_theta = _impl.scan_theta

__all__ = ["BACKEND", "solve_qp", "eval_theta", "scan_theta"]
