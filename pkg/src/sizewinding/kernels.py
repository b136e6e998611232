"""Select compiled kernels when available, numpy fallbacks otherwise.

Set ``SIZEWINDING_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _fallback

_compiled = None
if not os.environ.get("SIZEWINDING_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None

_impl = _compiled if _compiled is not None else _fallback

IMPLEMENTATION: str = _impl.IMPLEMENTATION
fwht = _impl.fwht
pauli_coefficients = _impl.pauli_coefficients
matrix_from_pauli_coefficients = _impl.matrix_from_pauli_coefficients

master_rhs = _impl.master_rhs
rk4_integrate = _impl.rk4_integrate
pauli_jump_sizes = _impl.pauli_jump_sizes

__all__ = [
    "IMPLEMENTATION",
    "fwht",
    "pauli_coefficients",
    "matrix_from_pauli_coefficients",
    "master_rhs",
    "rk4_integrate",
    "pauli_jump_sizes",
]
