"""Selects the compiled splitting kernel when it is importable.

Set ``TAILCS_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

from . import _pykernel

EXHAUSTED, CONVERGED, STABLE = _pykernel.EXHAUSTED, _pykernel.CONVERGED, _pykernel.STABLE

python_admm_steps = _pykernel.admm_steps

try:
    from ._kernel import admm_steps as compiled_admm_steps
except ImportError:  # extension not built
    compiled_admm_steps = None

if compiled_admm_steps is not None and os.environ.get("TAILCS_PURE_PYTHON") != "1":
    admm_steps = compiled_admm_steps
    BACKEND = "compiled"
else:
    admm_steps = python_admm_steps
    BACKEND = "python"
