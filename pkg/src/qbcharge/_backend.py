"""Selection of the propagation backend at import time.

The compiled kernel (``qbcharge._kernel``, built from Cython) is used
whenever it imported cleanly; otherwise the pure-Python path in
:mod:`qbcharge.propagator` takes over with identical semantics.  Set
``QBCHARGE_BACKEND=python`` or ``=compiled`` to force a choice.
"""

from __future__ import annotations

import os

FORCED = os.environ.get("QBCHARGE_BACKEND") or None

if FORCED not in (None, "compiled", "python"):
    raise ValueError(
        f"QBCHARGE_BACKEND must be 'compiled' or 'python', got {FORCED!r}")

try:
    from . import _kernel as _compiled
except ImportError:
    _compiled = None

if FORCED == "compiled" and _compiled is None:
    raise ImportError(
        "QBCHARGE_BACKEND=compiled but the extension is not built; "
        "reinstall without QBCHARGE_NO_EXT or drop the override")


def kernel(override: str | None = None):
    """Compiled kernel module, or None when the Python path is active."""
    choice = override or FORCED or ("compiled" if _compiled is not None
                                    else "python")
    if choice == "python":
        return None
    if choice == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel requested but not built")
        return _compiled
    raise ValueError(f"unknown backend {choice!r}")


def active_backend() -> str:
    """Name of the backend the protocol paths will use by default."""
    return "python" if kernel() is None else "compiled"


def compiled_available() -> bool:
    return _compiled is not None
