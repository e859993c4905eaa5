"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise, or when
``SPRINGCOOL_PURE_PYTHON`` is set to a non-empty value other than ``0``, the
pure-Python reference is used. ``BACKEND`` records the choice.
"""

from __future__ import annotations

import os

from . import _kernels_py

_FORCE_PY = os.environ.get("SPRINGCOOL_PURE_PYTHON", "") not in ("", "0")

_ext = None
if not _FORCE_PY:
    try:
        from . import _kernels as _ext  # type: ignore[attr-defined]
    except ImportError:
        _ext = None

_impl = _ext if _ext is not None else _kernels_py
BACKEND = "cython" if _ext is not None else "python"

sxx_moment = _impl.sxx_moment
sxx_moment_tail = _impl.sxx_moment_tail
cooling_state = _impl.cooling_state
inverse_purity = _impl.inverse_purity
optimal_cot = _impl.optimal_cot


def low_level_integrands():
    """``(body, tail)`` as scipy LowLevelCallables, or ``None`` without the extension."""
    if _ext is None:
        return None
    from scipy import LowLevelCallable

    return (
        LowLevelCallable.from_cython(_ext, "sxx_moment_llc"),
        LowLevelCallable.from_cython(_ext, "sxx_moment_tail_llc"),
    )
