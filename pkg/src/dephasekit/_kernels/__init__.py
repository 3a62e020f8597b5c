"""Kernel selection: compiled extension if importable, numpy fallback otherwise.

Set DEPHASEKIT_FORCE_FALLBACK=1 to force the numpy path (used by the
benchmark and the backend-equivalence tests).
"""
from __future__ import annotations

import os

from . import _filter_py

if os.environ.get("DEPHASEKIT_FORCE_FALLBACK", "") not in ("", "0"):
    _impl = _filter_py
else:
    try:
        from . import _filter_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _filter_py

filter_grid = _impl.filter_grid
BACKEND = _impl.BACKEND

__all__ = ["filter_grid", "BACKEND", "_filter_py"]
