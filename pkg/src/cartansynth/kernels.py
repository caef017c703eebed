"""Kernel backend selection.

The compiled extension is used when it imports; setting
``CARTANSYNTH_PURE=1`` forces the numpy fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("CARTANSYNTH_PURE") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

apply_chain = _impl.apply_chain
cost_grad = _impl.cost_grad
residual_jacobian = _impl.residual_jacobian

__all__ = ["BACKEND", "apply_chain", "cost_grad", "residual_jacobian"]
